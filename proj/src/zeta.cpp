#include "mesozeta/zeta.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "mesozeta/errors.hpp"
#include "mesozeta/summation.hpp"

namespace mesozeta {
namespace {

using cd = std::complex<double>;

constexpr long double kPiL = 3.14159265358979323846264338327950288L;
constexpr long double kTwoPiL = 6.28318530717958647692528676655900577L;
constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kLog2Pi = 1.83787706640934548356065947281123527;

// B_{2k} / (2k)! for k = 1..6.
constexpr std::array<double, 6> kBernoulliOverFactorial{
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40320.0,
    5.0 / 66.0 / 3628800.0,
    -691.0 / 2730.0 / 479001600.0,
};

// Taylor data for Psi around p = 1/2, i.e. x = p - 1/2, where
// Psi = -cos(2 pi x^2 - 5 pi / 8) / cos(2 pi x). Coefficients come from a
// Cauchy integral over |x| = 1; the function is entire so the only error is
// rounding on the contour (|Psi| < 300 there).
class PsiSeries {
 public:
  static constexpr int kTerms = 110;
  static constexpr int kNodes = 256;
  static constexpr int kMaxOrder = 9;
  static constexpr int kEvalTerms = 64;

  PsiSeries() {
    std::vector<std::complex<long double>> values(kNodes);
    for (int j = 0; j < kNodes; ++j) {
      const long double phi = kTwoPiL * (j + 0.5L) / kNodes;
      const std::complex<long double> x(std::cos(phi), std::sin(phi));
      values[j] = -std::cos(kTwoPiL * x * x - 5.0L * kPiL / 8.0L) / std::cos(kTwoPiL * x);
    }
    std::array<long double, kTerms> a{};
    for (int k = 0; k < kTerms; ++k) {
      std::complex<long double> acc = 0;
      for (int j = 0; j < kNodes; ++j) {
        const long double phi = kTwoPiL * (j + 0.5L) / kNodes;
        acc += values[j] * std::complex<long double>(std::cos(k * phi), -std::sin(k * phi));
      }
      a[k] = acc.real() / kNodes;
    }
    for (int m = 0; m <= kMaxOrder; ++m) {
      auto& d = deriv_[m];
      for (int j = 0; j + m < kTerms; ++j) {
        long double falling = 1;
        for (int i = 0; i < m; ++i) falling *= static_cast<long double>(j + m - i);
        d[j] = a[j + m] * falling;
      }
    }
  }

  // Valid for |x| <= 1/2, where terms beyond kEvalTerms are below 1e-19.
  long double derivative(long double x, int m) const {
    const auto& d = deriv_[m];
    long double acc = 0;
    for (int j = kEvalTerms - 1; j >= 0; --j) acc = acc * x + d[j];
    return acc;
  }

 private:
  std::array<std::array<long double, kTerms>, kMaxOrder + 1> deriv_{};
};

const PsiSeries& psi_series() {
  static const PsiSeries s;
  return s;
}

// log n and n^-1/2 for the Riemann-Siegel main sum; covers t up to ~1e8.
struct MainSumTables {
  static constexpr int kMaxN = 4000;
  std::vector<long double> log_n;
  std::vector<double> inv_sqrt;
  MainSumTables() : log_n(kMaxN + 1), inv_sqrt(kMaxN + 1) {
    for (int n = 1; n <= kMaxN; ++n) {
      log_n[n] = std::log(static_cast<long double>(n));
      inv_sqrt[n] = 1.0 / std::sqrt(static_cast<double>(n));
    }
  }
};

const MainSumTables& main_sum_tables() {
  static const MainSumTables t;
  return t;
}

void require_z_domain(double t, const char* who) {
  if (!(t >= 10.0)) {
    std::ostringstream os;
    os << who << ": t must be >= 10 (asymptotic regime), got " << t;
    throw DomainError(os.str());
  }
}

ZetaValue em_eval(ComplexPoint p, bool want_derivative) {
  if (!std::isfinite(p.sigma) || !std::isfinite(p.tau)) throw DomainError("zeta: non-finite argument");
  if (p.sigma == 1.0 && p.tau == 0.0) throw PoleError("zeta: pole at s = 1");
  if (!(p.sigma > 0.0)) throw DomainError("zeta: sigma must be > 0 (no functional equation)");
  const cd s = p.value();
  const long n_terms = static_cast<long>(std::ceil(std::max(std::fabs(p.tau), 10.0))) + 20;

  CompensatedComplexSum z, dz;
  for (long n = 1; n < n_terms; ++n) {
    const double ln = std::log(static_cast<double>(n));
    const double mag = std::exp(-p.sigma * ln);
    const double ph = p.tau * ln;
    const cd term(mag * std::cos(ph), -mag * std::sin(ph));
    z.add(term);
    if (want_derivative) dz.add(-ln * term);
  }

  const double big_n = static_cast<double>(n_terms);
  const double log_n = std::log(big_n);
  const cd n_pow_s = std::exp(-s * log_n);  // N^-s
  const cd n_1ms = big_n * n_pow_s;         // N^(1-s)
  const cd sm1 = s - 1.0;
  z.add(n_1ms / sm1 + 0.5 * n_pow_s);
  if (want_derivative) dz.add(-log_n * n_1ms / sm1 - n_1ms / (sm1 * sm1) - 0.5 * log_n * n_pow_s);

  cd poly = s;  // s (s+1) ... (s+2k-2)
  cd dpoly = 1.0;
  cd npow = n_pow_s / big_n;  // N^(-s-2k+1)
  for (int k = 1; k <= 6; ++k) {
    const double c = kBernoulliOverFactorial[k - 1];
    z.add(c * poly * npow);
    if (want_derivative) dz.add(c * (dpoly - log_n * poly) * npow);
    const cd f1 = s + static_cast<double>(2 * k - 1);
    const cd f2 = s + static_cast<double>(2 * k);
    dpoly = dpoly * f1 * f2 + poly * (f1 + f2);
    poly *= f1 * f2;
    npow /= big_n * big_n;
  }
  return {z.value(), dz.value()};
}

}  // namespace

namespace detail {

long double theta_ld(long double t) {
  const long double r = 1.0L / t;
  const long double r2 = r * r;
  const long double series =
      r * (1.0L / 48.0L +
           r2 * (7.0L / 5760.0L +
                 r2 * (31.0L / 80640.0L + r2 * (127.0L / 430080.0L + r2 * (511.0L / 1216512.0L)))));
  return 0.5L * t * std::log(t / kTwoPiL) - 0.5L * t - kPiL / 8.0L + series;
}

double rs_psi_derivative(double p, int order) {
  if (order < 0 || order > PsiSeries::kMaxOrder) throw DomainError("rs_psi_derivative: order out of range");
  return static_cast<double>(psi_series().derivative(static_cast<long double>(p) - 0.5L, order));
}

double z_unchecked(double t) {
  if (t < kZHybridCutoff) {
    const cd zeta = em_eval({0.5, t}, false).zeta;
    const double th = static_cast<double>(std::fmod(theta_ld(t), kTwoPiL));
    return (std::polar(1.0, th) * zeta).real();
  }
  return riemann_siegel_series(t);
}

}  // namespace detail

double theta(double t) {
  require_z_domain(t, "theta");
  return static_cast<double>(detail::theta_ld(t));
}

double riemann_siegel_z(double t) {
  require_z_domain(t, "riemann_siegel_z");
  return detail::z_unchecked(t);
}

double riemann_siegel_series(double t) {
  require_z_domain(t, "riemann_siegel_series");
  const auto& tab = main_sum_tables();
  const long double tl = t;
  const long double tau = std::sqrt(tl / kTwoPiL);
  const long n = static_cast<long>(std::floor(tau));
  if (n > MainSumTables::kMaxN) throw DomainError("riemann_siegel_series: t above supported range");
  const long double th = detail::theta_ld(tl);

  CompensatedSum main;
  constexpr long double inv_two_pi = 1.0L / kTwoPiL;
  for (long k = 1; k <= n; ++k) {
    const long double arg = th - tl * tab.log_n[k];
    const auto turns = static_cast<long long>(arg * inv_two_pi);
    main.add(tab.inv_sqrt[k] * std::cos(static_cast<double>(arg - kTwoPiL * static_cast<long double>(turns))));
  }

  const auto& psi = psi_series();
  const long double x = (tau - static_cast<long double>(n)) - 0.5L;
  const long double pi2 = kPiL * kPiL;
  const long double c0 = psi.derivative(x, 0);
  const long double c1 = -psi.derivative(x, 3) / (96.0L * pi2);
  const long double c2 = psi.derivative(x, 2) / (64.0L * pi2) + psi.derivative(x, 6) / (18432.0L * pi2 * pi2);
  const long double c3 = -psi.derivative(x, 1) / (64.0L * pi2) - psi.derivative(x, 5) / (3840.0L * pi2 * pi2) -
                         psi.derivative(x, 9) / (5308416.0L * pi2 * pi2 * pi2);
  const long double inv = 1.0L / tau;
  const long double corr = (c0 + inv * (c1 + inv * (c2 + inv * c3))) / std::sqrt(tau);
  const double sign = (n % 2 == 1) ? 1.0 : -1.0;  // (-1)^(N-1)
  return 2.0 * main.value() + sign * static_cast<double>(corr);
}

std::complex<double> euler_maclaurin_zeta(ComplexPoint s) { return em_eval(s, false).zeta; }

ZetaValue euler_maclaurin_zeta_with_derivative(ComplexPoint s) { return em_eval(s, true); }

std::complex<double> zeta_logderiv(ComplexPoint s) {
  const ZetaValue v = em_eval(s, true);
  const double mag = std::abs(v.zeta);
  if (mag < kSingularityThreshold) {
    std::ostringstream os;
    os << "zeta_logderiv: |zeta(s)| = " << mag << " below " << kSingularityThreshold << " at s = " << s.sigma
       << (s.tau < 0 ? " - " : " + ") << std::fabs(s.tau) << "i";
    throw SingularityError(os.str(), mag);
  }
  return v.dzeta / v.zeta;
}

double selberg_tail_bound(ComplexPoint s, double u, double height) {
  const double a = std::fabs(s.tau);
  const double x = height - a;
  if (!(x > 0.0)) return std::numeric_limits<double>::infinity();
  const double log_h = std::log(height);
  // integral over gamma > H of log(gamma / 2 pi) / (2 pi (gamma - a)^2)
  double integral = (log_h - kLog2Pi) / x;
  integral += (a > 0.0) ? std::log(height / x) / a : 1.0 / height;
  // allowance for the O(log H) fluctuation of the zero count at H
  const double density_part = integral / (2.0 * kPi) + log_h / (x * x);
  const double prefactor =
      (std::pow(u, 0.5 - s.sigma) + std::pow(u, 1.0 - 2.0 * s.sigma)) / std::log(u);
  return 2.0 * prefactor * density_part;
}

SelbergDecomposition selberg_decomposition(ComplexPoint s, double u, const ZeroTable& zeros,
                                           const PrimeTable& primes) {
  if (!(u > 1.0)) throw DomainError("selberg_decomposition: u must exceed 1");
  if (!std::isfinite(s.sigma) || !std::isfinite(s.tau)) throw DomainError("selberg_decomposition: non-finite s");
  if (s.sigma == 1.0 && s.tau == 0.0) throw PoleError("selberg_decomposition: s = 1");
  const double needed = 2.0 * std::fabs(s.tau);
  if (zeros.height() < needed || zeros.floor() > 0.0) {
    std::ostringstream os;
    os << "selberg_decomposition: zero table must cover (0, " << needed << "], have (" << zeros.floor() << ", "
       << zeros.height() << "]";
    throw CoverageError(os.str());
  }
  const double u2 = u * u;
  const auto max_n = static_cast<std::uint64_t>(std::floor(u2));
  if (primes.limit() < max_n) {
    throw ResourceError("selberg_decomposition: primes sieved to " + std::to_string(primes.limit()) +
                        ", need " + std::to_string(max_n));
  }

  const cd sv = s.value();
  const double log_u = std::log(u);
  SelbergDecomposition out;

  CompensatedComplexSum a_sum;
  primes.for_each_prime_power(max_n, [&](std::uint64_t n, std::uint64_t p, unsigned) {
    const double w = smoothed_weight(std::log(static_cast<double>(p)), n, u);
    if (w == 0.0) return;
    a_sum.add(-w * std::exp(-sv * std::log(static_cast<double>(n))));
  });
  out.a_u = a_sum.value();

  CompensatedComplexSum b_sum;
  for (double g : zeros.ordinates()) {
    for (double sign : {1.0, -1.0}) {
      const cd w = cd(0.5, sign * g) - sv;
      if (std::abs(w) < 1e-12) throw DomainError("selberg_decomposition: s coincides with a zero");
      b_sum.add((std::exp(w * log_u) - std::exp(2.0 * w * log_u)) / (w * w));
    }
  }
  out.b_u = b_sum.value() / log_u;
  out.b_u_truncation_height = zeros.height();
  out.b_u_tail_bound = selberg_tail_bound(s, u, zeros.height());

  CompensatedComplexSum c_sum;
  for (int n = 1; n < 100000; ++n) {
    const cd w = 2.0 * n + sv;
    const cd term = (std::exp(-w * log_u) - std::exp(-2.0 * w * log_u)) / (w * w);
    c_sum.add(term);
    if (std::abs(term) < 1e-16) break;
  }
  out.c_u = c_sum.value() / log_u;

  const cd oms = 1.0 - sv;
  out.d_u = (std::exp(2.0 * oms * log_u) - std::exp(oms * log_u)) / (log_u * oms * oms);

  out.reference_logderiv = zeta_logderiv(s);
  out.defect = std::abs(out.total() - out.reference_logderiv);
  return out;
}

SelbergDecomposition selberg_decomposition(ComplexPoint s, double u, const ZeroTable& zeros) {
  const auto limit = static_cast<std::uint64_t>(std::floor(u * u));
  return selberg_decomposition(s, u, zeros, PrimeTable::sieve(std::max<std::uint64_t>(limit, 2)));
}

}  // namespace mesozeta
