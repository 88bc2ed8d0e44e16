#include "mesozeta/linstat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mesozeta/errors.hpp"
#include "mesozeta/quadrature.hpp"
#include "mesozeta/summation.hpp"

namespace mesozeta {
namespace {

using cd = std::complex<double>;
constexpr double kPi = 3.14159265358979323846;

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

// Window of x = lambda (gamma - omega t) outside which |f| < tol.
std::pair<double, double> window_x(const TestFunction& f, double tol) { return f.range(tol); }

}  // namespace

ScalePoint ScalePoint::make(double omega, double t, double lambda, double alpha) {
  if (!(omega > 1.0 && omega < 2.0)) throw ParameterError("omega must lie in (1, 2), got " + num(omega));
  if (!(t >= 100.0)) throw ParameterError("t must be >= 100, got " + num(t));
  if (!(lambda > 0.0 && lambda < std::log(t))) {
    throw ParameterError("lambda must lie in (0, log t) = (0, " + num(std::log(t)) + "), got " + num(lambda));
  }
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("alpha must lie in (0, 1], got " + num(alpha));
  ScalePoint s;
  s.omega = omega;
  s.t = t;
  s.lambda = lambda;
  s.alpha = alpha;
  s.u = std::pow(t, alpha);
  return s;
}

// ------------------------------------------------------------ zero side

double required_zero_height(const TestFunction& f, double t, double lambda, double tol) {
  return 2.0 * t + std::max(0.0, window_x(f, tol).second) / lambda;
}

ZeroSide zero_side_stat(const TestFunction& f, const ZeroTable& zeros, const ScalePoint& s, double tol) {
  const auto [xlo, xhi] = window_x(f, tol);
  const double center = s.omega * s.t;
  const double glo = center + xlo / s.lambda;
  const double ghi = center + xhi / s.lambda;
  if (zeros.height() < ghi) {
    throw CoverageError("zero table reaches " + num(zeros.height()) + " but the window needs " + num(ghi) +
                        "; compute zeros to at least " + num(required_zero_height(f, s.t, s.lambda, tol)));
  }
  if (zeros.floor() > 0.0 && zeros.floor() >= glo) {
    throw CoverageError("zero table starts at " + num(zeros.floor()) + " but the window needs " + num(glo));
  }
  ZeroSide out;
  CompensatedSum sum;
  const auto win = zeros.window(glo, ghi);
  for (double g : win) sum.add(f.f(s.lambda * (g - center)));
  // mirrored ordinates -gamma land at x <= -lambda (gamma + omega t)
  if (xlo < 0.0) {
    const auto mirror = zeros.window(0.0, -center - xlo / s.lambda);
    for (double g : mirror) sum.add(f.f(s.lambda * (-g - center)));
    out.window_count += mirror.size();
  }
  out.window_count += win.size();
  out.sum = sum.value();
  out.centering = std::log(s.t) / (2.0 * kPi * s.lambda) * f.integral();
  out.value = out.sum - out.centering;

  // |f| < tol at every table ordinate outside the window; past the table
  // the envelope c |x|^(-2-delta) is summed against the zero density.
  const double outside = 2.0 * static_cast<double>(zeros.size()) - static_cast<double>(out.window_count);
  out.truncation_bound = tol * std::max(0.0, outside);
  if (!f.support) {
    const double x_h = s.lambda * (zeros.height() - center);
    if (f.envelope && x_h > 1.0) {
      const auto& e = *f.envelope;
      const double density = std::log(zeros.height() + x_h / s.lambda) / (2.0 * kPi * s.lambda);
      out.truncation_bound += 2.0 * density * e.c * std::pow(x_h, -1.0 - e.delta) / (1.0 + e.delta);
    } else {
      out.truncation_bound += tol;
    }
  }
  return out;
}

double zero_side_bruteforce(const TestFunction& f, const ZeroTable& zeros, const ScalePoint& s) {
  const double center = s.omega * s.t;
  long double acc = 0.0L;
  for (double g : zeros.ordinates()) {
    acc += f.f(s.lambda * (g - center));
    acc += f.f(s.lambda * (-g - center));
  }
  return static_cast<double>(acc) - std::log(s.t) / (2.0 * kPi * s.lambda) * f.integral();
}

// ----------------------------------------------------------- prime side

PrimeSideKernel::PrimeSideKernel(const TestFunction& f, const ScalePoint& s, const PrimeTable& primes, Taper taper)
    : t_(s.t), lambda_(s.lambda), u_(s.u) {
  const double u2 = u_ * u_;
  if (static_cast<double>(primes.limit()) < std::floor(u2)) {
    throw ResourceError("prime table reaches " + std::to_string(primes.limit()) + " but u^2 = " + num(u2));
  }
  const auto max_n = static_cast<std::uint64_t>(std::floor(u2));
  const double scale = -1.0 / (2.0 * lambda_);
  primes.for_each_prime_power(max_n, [&](std::uint64_t n, std::uint64_t p, unsigned k) {
    const double logp = std::log(static_cast<double>(p));
    const double w = smoothed_weight(logp, n, u_, taper);
    if (w == 0.0) return;
    const double logn = std::log(static_cast<double>(n));
    const double xi = logn / lambda_;
    const cd fp = f.fourier(xi);
    const cd fm = f.fourier(-xi);
    const double amp = w / std::sqrt(static_cast<double>(n));
    tlog_.push_back(t_ * logn);
    plus_.push_back(scale * amp * fp);
    minus_.push_back(scale * amp * fm);
    is_power_.push_back(k > 1);
    coeffs_.push_back({n, k, amp * fp / lambda_});
  });
}

PrimeSide PrimeSideKernel::evaluate(double omega) const {
  CompensatedComplexSum all, pr, pw;
  for (std::size_t i = 0; i < tlog_.size(); ++i) {
    const double phase = omega * tlog_[i];
    const cd e(std::cos(phase), -std::sin(phase));  // n^(-i omega t)
    const cd term = plus_[i] * e + minus_[i] * std::conj(e);
    all.add(term);
    (is_power_[i] ? pw : pr).add(term);
  }
  PrimeSide out;
  const cd full = all.value();
  out.full = full.real();
  out.primes = pr.value().real();
  out.powers = pw.value().real();
  out.imag_defect = std::fabs(full.imag());
  return out;
}

double PrimeSideKernel::evaluate(double omega, PrimeMode mode) const {
  const PrimeSide v = evaluate(omega);
  switch (mode) {
    case PrimeMode::primes_only:
      return v.primes;
    case PrimeMode::powers_only:
      return v.powers;
    case PrimeMode::all:
      break;
  }
  return v.full;
}

double prime_side_stat(const TestFunction& f, const ScalePoint& s, const PrimeTable& primes, PrimeMode mode) {
  return PrimeSideKernel(f, s, primes).evaluate(s.omega, mode);
}

// ------------------------------------------------------------- residual

double residual_envelope(const NormBundle& n, double t, double lambda) {
  return lambda / std::log(t) * (n.l1_f + n.l1_f1 + n.l1_f2);
}

LinStatSample explicit_residual(const TestFunction& f, const ZeroTable& zeros, const PrimeSideKernel& kernel,
                                const ScalePoint& s, const NormBundle& norms) {
  if (kernel.t() != s.t || kernel.lambda() != s.lambda || kernel.u() != s.u) {
    throw ParameterError("explicit_residual: kernel built for a different (t, lambda, u)");
  }
  LinStatSample out;
  out.scale = s;
  const ZeroSide z = zero_side_stat(f, zeros, s);
  const PrimeSide p = kernel.evaluate(s.omega);
  out.zero_side = z.value;
  out.zero_truncation_bound = z.truncation_bound;
  out.prime_full = p.full;
  out.prime_primes = p.primes;
  out.prime_powers = p.powers;
  out.prime_imag_defect = p.imag_defect;
  out.residual = out.zero_side - out.prime_full;
  out.envelope = residual_envelope(norms, s.t, s.lambda);
  return out;
}

LinStatSample explicit_residual(const TestFunction& f, const ZeroTable& zeros, const ScalePoint& s,
                                const PrimeTable& primes) {
  return explicit_residual(f, zeros, PrimeSideKernel(f, s, primes), s, norms(f));
}

// ------------------------------------------------------------- diagonal

DiagonalReport diagonal_report(const TestFunction& f, double t, double lambda, double u, const PrimeTable& primes) {
  if (!(t > 1.0) || !(lambda > 0.0) || !(u > 1.0)) throw ParameterError("diagonal_report: need t > 1, lambda > 0, u > 1");
  const double u2 = u * u;
  if (static_cast<double>(primes.limit()) < std::floor(u2)) {
    throw ResourceError("prime table reaches " + std::to_string(primes.limit()) + " but u^2 = " + num(u2));
  }
  DiagonalReport r;
  CompensatedSum sum;
  for (std::uint32_t p32 : primes.primes()) {
    const double p = p32;
    if (p > u2) break;
    const double logp = std::log(p);
    const double w = smoothed_weight(logp, p32, u);
    const double b = w / (lambda * std::sqrt(p)) * std::abs(f.fourier(logp / lambda));
    sum.add(b * b);
  }
  r.sum_bpt_sq = sum.value();
  auto integrand = [&](double xi) { return xi * std::norm(f.fourier(xi)); };
  const double mid = std::log(t) / (2.0 * lambda);
  const double top = std::log(t) / lambda;
  const double w = std::min(0.25, 0.5 * f.length_scale);
  r.main_integral = quad::panels(integrand, 0.0, mid, w, {}, 1e-12);
  r.remainder_integral = quad::panels(integrand, mid, top, w, {}, 1e-12);
  r.ratio = r.main_integral > 0.0 ? r.sum_bpt_sq / r.main_integral : 0.0;
  return r;
}

PowerShare prime_power_share(const PrimeSideKernel& kernel) {
  CompensatedSum primes, squares;
  for (const auto& c : kernel.coefficients()) {
    if (c.k == 1) primes.add(std::norm(c.b));
    if (c.k == 2) squares.add(std::norm(c.b));
  }
  if (primes.value() == 0.0) return {0.0, true};
  return {squares.value() / primes.value(), false};
}

PowerShare prime_power_share(const PrimeSideKernel& kernel, const std::vector<double>& omegas) {
  CompensatedSum primes, powers;
  for (double w : omegas) {
    const PrimeSide v = kernel.evaluate(w);
    primes.add(v.primes * v.primes);
    powers.add(v.powers * v.powers);
  }
  if (primes.value() == 0.0) return {0.0, true};
  return {powers.value() / primes.value(), false};
}

double tail_cutoff(const TestFunction& f, double t, double lambda) {
  const double s2 = sigma_t_sq(f, lambda);
  if (!(s2 > 0.0)) throw DomainError("tail_cutoff: sigma_t vanishes");
  return std::exp(std::log(t) / std::sqrt(s2));
}

double tail_condition(const TestFunction& f, double t, double lambda, double u, double m, const PrimeTable& primes) {
  const double u2 = u * u;
  if (static_cast<double>(primes.limit()) < std::floor(u2)) {
    throw ResourceError("prime table reaches " + std::to_string(primes.limit()) + " but u^2 = " + num(u2));
  }
  const double s2 = sigma_t_sq(f, lambda);
  if (!(s2 > 0.0)) throw DomainError("tail_condition: sigma_t vanishes");
  CompensatedSum sum;
  for (std::uint32_t p32 : primes.primes()) {
    const double p = p32;
    if (p > u2) break;
    if (p <= m) continue;
    const double logp = std::log(p);
    const double w = smoothed_weight(logp, p32, u);
    const double a = w / (lambda * std::sqrt(p)) * std::abs(f.fourier(logp / lambda));
    sum.add(a * a / s2 * (1.0 + p / t));
  }
  return sum.value();
}

// ------------------------------------------------- Montgomery-Vaughan

MvResult mv_check(const std::vector<cd>& a, const std::vector<double>& freqs, double t, double c) {
  if (a.size() != freqs.size()) throw ParameterError("mv_check: coefficient and frequency counts differ");
  if (!(t > 0.0)) throw ParameterError("mv_check: t must be > 0");
  const std::size_t n = a.size();
  std::vector<double> delta(n, std::numeric_limits<double>::infinity());
  double spread = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t q = 0; q < n; ++q) {
      if (q == r) continue;
      const double d = std::fabs(freqs[r] - freqs[q]);
      if (d == 0.0) throw DomainError("mv_check: repeated frequency " + num(freqs[r]) + " gives delta = 0");
      delta[r] = std::min(delta[r], d);
      spread = std::max(spread, d);
    }
  }
  auto integrand = [&](double s) {
    cd z = 0.0;
    for (std::size_t r = 0; r < n; ++r) z += a[r] * std::polar(1.0, freqs[r] * s);
    return std::norm(z);
  };
  MvResult out;
  const double width = std::min(t, kPi / (spread + 1.0));
  double err = 0.0;
  out.lhs = quad::panels(integrand, t, 2.0 * t, width, {}, 1e-12, &err) / t;
  const double panel_count = std::ceil(t / width) + 1.0;
  out.quad_error = err / t + 4.0 * panel_count * std::numeric_limits<double>::epsilon() * out.lhs;
  CompensatedSum rhs;
  for (std::size_t r = 0; r < n; ++r) rhs.add(std::norm(a[r]) * (1.0 + c / (t * delta[r])));
  out.rhs = rhs.value();
  out.holds = out.lhs - out.quad_error <= out.rhs;
  return out;
}

}  // namespace mesozeta
