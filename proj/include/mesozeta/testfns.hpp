#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mesozeta {

// Fourier convention throughout: fhat(xi) = (1/pi) * integral f(x) exp(-i xi x) dx.

enum class Smoothness { smooth, c2, lipschitz, discontinuous };
const char* to_string(Smoothness s);

// Jump of a function at x: right limit minus left limit.
struct Jump {
  double x;
  double size;
};

// |f(x)| <= c |x|^(-2-delta) for large |x|.
struct DecayEnvelope {
  double c;
  double delta;
};

struct TestFunction {
  using RealFn = std::function<double(double)>;
  using FourierFn = std::function<std::complex<double>(double)>;

  std::string name;
  RealFn f;
  RealFn d1;
  RealFn d2;  // absolutely continuous part where f' jumps
  FourierFn fourier;
  bool closed_form_fourier = false;
  std::vector<Jump> jumps;     // of f
  std::vector<Jump> d1_jumps;  // of f' (atoms of f'')
  std::optional<std::pair<double, double>> support;
  // |f|, |f'|, |f''| < eps outside [-R(eps), R(eps)].
  std::function<double(double)> radius;
  std::optional<DecayEnvelope> envelope;
  Smoothness smoothness = Smoothness::smooth;
  double length_scale = 1.0;  // width of the main feature, sets panel sizes

  // Integration range holding everything above eps.
  std::pair<double, double> range(double eps = 1e-17) const;
  // Jump and kink locations, sorted.
  std::vector<double> breakpoints() const;
  // integral of f, as pi * fhat(0).
  double integral() const;
};

struct BuiltinInfo {
  std::string name;
  std::string params;
  std::string defaults;
  std::string description;
};
const std::vector<BuiltinInfo>& builtin_catalog();

// gaussian(m, s), c2_bump(center, halfwidth), indicator(a, b), tent(a, b),
// mollified_indicator(a, b, eps). Throws ParameterError on bad parameters.
TestFunction builtin(const std::string& name, const std::vector<double>& params);
// "name" or "name:p1,p2,..."; missing parameters take the catalog defaults.
TestFunction parse_function(const std::string& spec);

TestFunction scaled(const TestFunction& f, double a);
TestFunction linear_combination(double a, const TestFunction& f, double b, const TestFunction& g);
TestFunction shifted(const TestFunction& f, double a);  // x -> f(x - a)
TestFunction dilated(const TestFunction& f, double c);  // x -> f(x / c)

// fhat by panelized Gauss-Legendre over the support, split at jumps.
std::complex<double> fourier_quadrature(const TestFunction& f, double xi);

struct HHalf {
  double value = 0.0;
  bool divergent = false;
};

// Re integral |u| fhat(u) conj(ghat(u)) du with a doubling tail search.
HHalf h_half_inner(const TestFunction& f, const TestFunction& g);
// -(2/pi^2) double integral f'(x) g'(y) log|x - y|, jumps included as atoms.
HHalf h_half_logkernel(const TestFunction& f, const TestFunction& g);

// integral over [-lambda, lambda] of |u| |fhat(u)|^2.
double sigma_t_sq(const TestFunction& f, double lambda);

enum class TvTarget { f, f1 };
enum class TvWeight { log_weighted, none };

struct TotalVariation {
  double value = 0.0;
  bool bounded = true;
};

// integral (1 + |u log|u||) |dh(u)| for h = f or f'; jumps of h contribute
// their size times the weight at the jump.
TotalVariation weighted_tv(const TestFunction& f, TvTarget which, TvWeight weight = TvWeight::log_weighted);

// The fixed C^2 bump on [-1, 1]: phi(y) = 1 - 10|y|^3 + 15|y|^4 - 6|y|^5,
// unit mass.
double bump(double y);
double bump_d1(double y);
double bump_d2(double y);
double bump_cdf(double y);
// integral phi(y) exp(-i w y) dy (real, even).
double bump_transform(double w);

// f * phi_eps with phi_eps(x) = phi(x / eps) / eps.
TestFunction mollify(const TestFunction& f, double eps);

struct NormBundle {
  double l1_f = 0.0, l1_f1 = 0.0, l1_f2 = 0.0;
  double xlog_f = 0.0, xlog_f1 = 0.0, xlog_f2 = 0.0;
};
// L1 norms of f, f', f'' (derivatives as measures) and their
// (1 + |x log|x||)-weighted versions. Infinite where a derivative has atoms
// that the next derivative cannot absorb.
NormBundle norms(const TestFunction& f);

struct HypothesisReport {
  bool decay_ok = false;
  bool bv_f1_ok = false;
  bool bv_f_ok = false;
  bool fourier_decay_ok = false;
  bool h_half_finite = false;
  std::vector<std::pair<std::string, std::string>> details;

  bool covariance_admissible() const { return decay_ok && bv_f1_ok && fourier_decay_ok && h_half_finite; }
  bool normalized_admissible() const { return decay_ok && bv_f_ok && fourier_decay_ok; }
};
HypothesisReport check_hypotheses(const TestFunction& f);

// Smooth cutoff: 1 on [0, 1/2], 0 on [1, inf), quintic smoothstep between.
double cutoff(double y);
double cutoff_d1(double y);

// f(q) recovered from the almost-analytic extension formula with the
// cutoff above. Requires continuous f; tol >= 1e-6.
double hs_reconstruct(const TestFunction& f, double q, double tol = 1e-8);

struct KernelIdentity {
  std::complex<double> lhs;
  std::complex<double> rhs;
};
// Both sides of the exponential-kernel identity obtained by integrating
// the almost-analytic extension against exp(-i delta x - delta y).
KernelIdentity exponential_kernel_identity(const TestFunction& f, double delta);

}  // namespace mesozeta
