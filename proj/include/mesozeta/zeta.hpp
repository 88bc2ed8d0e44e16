#pragma once

#include <complex>

#include "mesozeta/primes.hpp"
#include "mesozeta/zero_table.hpp"

namespace mesozeta {

struct ComplexPoint {
  double sigma = 0.0;
  double tau = 0.0;
  std::complex<double> value() const noexcept { return {sigma, tau}; }
};

// Riemann-Siegel theta from its asymptotic expansion through the t^-9 term.
// Absolute error below 1e-10 up to t ~ 1e8; beyond that the error is
// dominated by rounding of the leading term (relative ~1e-19).
// Throws DomainError for t < 10.
double theta(double t);

// Hardy's Z(t) = exp(i theta(t)) zeta(1/2 + it). Below t = 3000 it is taken
// from the Euler-Maclaurin evaluator, above from the Riemann-Siegel series.
// Throws DomainError for t < 10.
double riemann_siegel_z(double t);

// Riemann-Siegel main sum plus the correction terms C0..C3. Error about
// 5e-9 at t = 1000, 5e-11 at t = 5000, smaller above.
double riemann_siegel_series(double t);

inline constexpr double kZHybridCutoff = 3000.0;

struct ZetaValue {
  std::complex<double> zeta;
  std::complex<double> dzeta;
};

// zeta(s) by Dirichlet sum plus Euler-Maclaurin tail with Bernoulli terms
// through B12 (N = |tau| + 20 terms). Error ~1e-10 for |tau| <= 1e4; cost
// grows linearly in |tau|. Throws PoleError at s = 1, DomainError for sigma <= 0.
std::complex<double> euler_maclaurin_zeta(ComplexPoint s);
// zeta(s) and zeta'(s) from the same expansion differentiated term by term.
ZetaValue euler_maclaurin_zeta_with_derivative(ComplexPoint s);

inline constexpr double kSingularityThreshold = 1e-12;

// zeta'/zeta(s). Throws SingularityError when |zeta(s)| < 1e-12.
std::complex<double> zeta_logderiv(ComplexPoint s);

struct SelbergDecomposition {
  std::complex<double> a_u;
  std::complex<double> b_u;
  std::complex<double> c_u;
  std::complex<double> d_u;
  double b_u_truncation_height = 0.0;
  double b_u_tail_bound = 0.0;
  std::complex<double> reference_logderiv;
  double defect = 0.0;

  std::complex<double> total() const { return a_u + b_u + c_u + d_u; }
};

// Selberg's four-term expression for zeta'/zeta(s) with weight Lambda_u:
// prime sum A, truncated zero sum B (over 1/2 +- i*gamma in the table),
// trivial-zero sum C and pole term D. Requires zeros.height() >= 2|tau|
// (CoverageError otherwise) and primes sieved to u^2.
SelbergDecomposition selberg_decomposition(ComplexPoint s, double u, const ZeroTable& zeros,
                                           const PrimeTable& primes);
SelbergDecomposition selberg_decomposition(ComplexPoint s, double u, const ZeroTable& zeros);

// Bound on the zero-sum tail beyond height H, from the zero density.
double selberg_tail_bound(ComplexPoint s, double u, double height);

namespace detail {
// Unchecked versions valid down to t = 9, used for Gram point g_{-1}.
long double theta_ld(long double t);
double z_unchecked(double t);
// Derivatives of the Riemann-Siegel correction function
// Psi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p), p in [0, 1).
double rs_psi_derivative(double p, int order);
}  // namespace detail

}  // namespace mesozeta
