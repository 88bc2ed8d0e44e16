#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "mesozeta/primes.hpp"
#include "mesozeta/testfns.hpp"
#include "mesozeta/zero_table.hpp"

namespace mesozeta {

// One evaluation point: omega in (1, 2), height t, scale lambda, smoothing
// height u = t^alpha.
struct ScalePoint {
  double omega = 1.5;
  double t = 0.0;
  double lambda = 0.0;
  double alpha = 0.5;
  double u = 0.0;

  // Validates 1 < omega < 2, t >= 100, 0 < lambda < log t, 0 < alpha <= 1.
  static ScalePoint make(double omega, double t, double lambda, double alpha = 0.5);
  ScalePoint with_omega(double w) const { return make(w, t, lambda, alpha); }
};

struct ZeroSide {
  double value = 0.0;      // sum minus centering
  double sum = 0.0;        // sum of f(lambda (gamma - omega t)) over +-gamma
  double centering = 0.0;  // (log t)/(2 pi lambda) * integral f
  std::size_t window_count = 0;
  double truncation_bound = 0.0;  // bound on the ordinates left out
};

// Windowed zero sum. tol is the level below which |f| is dropped. Throws
// CoverageError (with the height needed) when the table misses the window.
ZeroSide zero_side_stat(const TestFunction& f, const ZeroTable& zeros, const ScalePoint& s, double tol = 1e-17);

// Same sum over every ordinate in the table with no window.
double zero_side_bruteforce(const TestFunction& f, const ZeroTable& zeros, const ScalePoint& s);

// Height a zero table must reach for every omega in (1, 2) at (t, lambda).
double required_zero_height(const TestFunction& f, double t, double lambda, double tol = 1e-17);

enum class PrimeMode { all, primes_only, powers_only };

struct PrimeSide {
  double full = 0.0;
  double primes = 0.0;
  double powers = 0.0;
  double imag_defect = 0.0;  // |Im| of the complex sum before reduction
};

// Prime side at fixed (t, lambda, u) for varying omega:
//   -(1/(2 lambda)) sum_{n <= u^2} Lambda_u(n)/sqrt(n)
//        * (fhat(log n/lambda) n^(-i omega t) + fhat(-log n/lambda) n^(i omega t)).
// Transform values are computed once at construction.
class PrimeSideKernel {
 public:
  PrimeSideKernel(const TestFunction& f, const ScalePoint& s, const PrimeTable& primes,
                  Taper taper = Taper::log_u);

  PrimeSide evaluate(double omega) const;
  double evaluate(double omega, PrimeMode mode) const;

  double t() const noexcept { return t_; }
  double lambda() const noexcept { return lambda_; }
  double u() const noexcept { return u_; }
  std::size_t terms() const noexcept { return tlog_.size(); }

  // b_n = Lambda_u(n) fhat(log n/lambda) / (lambda sqrt n), split by kind.
  struct Coefficient {
    std::uint64_t n;
    unsigned k;
    std::complex<double> b;
  };
  const std::vector<Coefficient>& coefficients() const noexcept { return coeffs_; }

 private:
  double t_, lambda_, u_;
  std::vector<double> tlog_;  // t log n
  std::vector<std::complex<double>> plus_, minus_;
  std::vector<unsigned char> is_power_;
  std::vector<Coefficient> coeffs_;
};

// Convenience wrapper building a kernel for a single point.
double prime_side_stat(const TestFunction& f, const ScalePoint& s, const PrimeTable& primes,
                       PrimeMode mode = PrimeMode::all);

struct LinStatSample {
  ScalePoint scale;
  double zero_side = 0.0;
  double prime_full = 0.0;
  double prime_primes = 0.0;
  double prime_powers = 0.0;
  double residual = 0.0;
  double zero_truncation_bound = 0.0;
  double prime_imag_defect = 0.0;
  double envelope = 0.0;  // (lambda / log t) * (|f|_1 + |f'|_1 + |f''|_1)
};

// (lambda / log t) times the L1 norm combination.
double residual_envelope(const NormBundle& n, double t, double lambda);

LinStatSample explicit_residual(const TestFunction& f, const ZeroTable& zeros, const PrimeSideKernel& kernel,
                                const ScalePoint& s, const NormBundle& norms);
LinStatSample explicit_residual(const TestFunction& f, const ZeroTable& zeros, const ScalePoint& s,
                                const PrimeTable& primes);

struct DiagonalReport {
  double sum_bpt_sq = 0.0;
  double main_integral = 0.0;       // integral_0^{log t/(2 lambda)} xi |fhat|^2
  double remainder_integral = 0.0;  // over [log t/(2 lambda), log t/lambda]
  double ratio = 0.0;               // sum_bpt_sq / main_integral
};

DiagonalReport diagonal_report(const TestFunction& f, double t, double lambda, double u, const PrimeTable& primes);

struct PowerShare {
  double share = 0.0;
  bool degenerate = false;  // both sums vanish
};

// Diagonal proxy: sum over squares of primes of |b_{p^2}|^2 divided by the
// prime sum of |b_p|^2.
PowerShare prime_power_share(const PrimeSideKernel& kernel);
// Empirical ratio of second moments over the given omegas.
PowerShare prime_power_share(const PrimeSideKernel& kernel, const std::vector<double>& omegas);

// sum_{m < p <= u^2} |a_pt|^2 (1 + p/t), a_pt = b_pt / sigma_t.
double tail_condition(const TestFunction& f, double t, double lambda, double u, double m, const PrimeTable& primes);
// exp(log t / sigma_t).
double tail_cutoff(const TestFunction& f, double t, double lambda);

struct MvResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double quad_error = 0.0;  // quadrature error estimate plus rounding in lhs
  bool holds = false;     // lhs <= rhs up to quad_error
};

inline constexpr double kMvConstant = 3.0 * 3.14159265358979323846;

// (1/t) int_t^{2t} |sum a_r exp(i lambda_r s)|^2 ds against
// sum |a_r|^2 (1 + c/(t delta_r)), delta_r the gap to the nearest other
// frequency (infinite for a single term). Throws DomainError on repeated frequencies.
MvResult mv_check(const std::vector<std::complex<double>>& a, const std::vector<double>& freqs, double t,
                  double c = kMvConstant);

}  // namespace mesozeta
