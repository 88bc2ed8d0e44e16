#include "mesozeta/testfns.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "mesozeta/errors.hpp"
#include "mesozeta/quadrature.hpp"
#include "mesozeta/summation.hpp"

namespace mesozeta {
namespace {

using cd = std::complex<double>;
constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kInf = std::numeric_limits<double>::infinity();

double sinc(double z) {
  if (std::fabs(z) < 1e-4) return 1.0 - z * z / 6.0;
  return std::sin(z) / z;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

std::string call_name(const std::string& name, const std::vector<double>& params) {
  std::string s = name + "(";
  for (std::size_t i = 0; i < params.size(); ++i) s += (i ? "," : "") + fmt(params[i]);
  return s + ")";
}

// Gaussian tail radius beyond which |f|, |f'|, |f''| stay below eps.
double gaussian_radius(double m, double s, double eps) {
  const double l = std::log(1.0 / std::min(eps, 0.5));
  const double extra = std::max(0.0, 2.0 * std::log(1.0 / s));
  return std::fabs(m) + s * (std::sqrt(2.0 * (l + extra + std::log(2.0 * l + 50.0))) + 1.0);
}

std::function<double(double)> fixed_radius(double r) {
  return [r](double) { return r; };
}

double weight(double u) {
  if (u == 0.0) return 1.0;
  return 1.0 + std::fabs(u * std::log(std::fabs(u)));
}

// Largest |x| reached by the function's effective range.
double extent(const TestFunction& f, double eps = 1e-12) {
  auto [lo, hi] = f.range(eps);
  return std::max(std::fabs(lo), std::fabs(hi));
}

// Integrates F over [a, b] on the frequency axis in panels of width w, to
// an absolute error of about 1e-13 * scale.
template <class F>
double freq_integral(F&& fn, double a, double b, double w, double scale = 0.0) {
  return quad::panels(fn, a, b, w, {}, 1e-13, nullptr, 1e-13 * scale);
}

double sum_abs_atoms(const std::vector<Jump>& atoms, bool weighted) {
  CompensatedSum s;
  for (const auto& j : atoms) s.add((weighted ? weight(j.x) : 1.0) * std::fabs(j.size));
  return s.value();
}

// integral of w(u) |h(u)| over the effective range, with a tail check for
// functions without compact support.
TotalVariation abs_integral(const TestFunction& f, const TestFunction::RealFn& h, bool weighted) {
  auto integrand = [&](double u) { return (weighted ? weight(u) : 1.0) * std::fabs(h(u)); };
  auto [lo, hi] = f.range(1e-16);
  if (!(hi > lo)) return {0.0, true};
  auto cuts = f.breakpoints();
  cuts.push_back(0.0);
  const double width = 0.25 * f.length_scale;
  CompensatedSum total;
  total.add(quad::panels(integrand, lo, hi, width, cuts, 1e-12));
  if (f.support) return {total.value(), true};
  double span = hi - lo;
  for (int k = 0; k < 12; ++k) {
    const double inc = quad::panels(integrand, hi, hi + span, width, {}, 1e-12) +
                       quad::panels(integrand, lo - span, lo, width, {}, 1e-12);
    total.add(inc);
    if (inc <= 1e-10 * total.value() + 1e-15) return {total.value(), true};
    lo -= span;
    hi += span;
    span *= 2;
  }
  return {total.value(), false};
}

}  // namespace

const char* to_string(Smoothness s) {
  switch (s) {
    case Smoothness::smooth:
      return "smooth";
    case Smoothness::c2:
      return "C2";
    case Smoothness::lipschitz:
      return "Lipschitz";
    case Smoothness::discontinuous:
      return "discontinuous";
  }
  return "?";
}

std::pair<double, double> TestFunction::range(double eps) const {
  if (support) return *support;
  const double r = radius(eps);
  return {-r, r};
}

std::vector<double> TestFunction::breakpoints() const {
  std::vector<double> b;
  for (const auto& j : jumps) b.push_back(j.x);
  for (const auto& j : d1_jumps) b.push_back(j.x);
  if (support) {
    b.push_back(support->first);
    b.push_back(support->second);
  }
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

double TestFunction::integral() const { return kPi * fourier(0.0).real(); }

// ---------------------------------------------------------------- bump

double bump(double y) {
  const double a = std::fabs(y);
  if (a >= 1.0) return 0.0;
  return 1.0 + a * a * a * (-10.0 + a * (15.0 - 6.0 * a));
}

double bump_d1(double y) {
  const double a = std::fabs(y);
  if (a >= 1.0) return 0.0;
  const double v = -30.0 * a * a * (1.0 - a) * (1.0 - a);
  return y < 0 ? -v : v;
}

double bump_d2(double y) {
  const double a = std::fabs(y);
  if (a >= 1.0) return 0.0;
  return a * (-60.0 + a * (180.0 - 120.0 * a));
}

double bump_cdf(double y) {
  if (y <= -1.0) return 0.0;
  if (y >= 1.0) return 1.0;
  const double a = std::fabs(y);
  const double half = a * (1.0 + a * a * a * (-2.5 + a * (3.0 - a)));
  return y < 0 ? 0.5 - half : 0.5 + half;
}

double bump_transform(double w) {
  w = std::fabs(w);
  if (w < 2.0) {
    // 2 sum_m (-1)^m w^(2m)/(2m)! * integral_0^1 y^(2m) P(y) dy
    double term = 1.0, acc = 0.0;
    for (int m = 0; m < 30; ++m) {
      const double k = 2.0 * m;
      const double moment = 1.0 / (k + 1) - 10.0 / (k + 4) + 15.0 / (k + 5) - 6.0 / (k + 6);
      acc += term * moment;
      term *= -w * w / ((k + 1) * (k + 2));
    }
    return 2.0 * acc;
  }
  // repeated integration by parts of integral_0^1 P(y) exp(i w y) dy
  const double p1[6] = {0.0, 0.0, 0.0, -60.0, -360.0, -720.0};
  const double p0[6] = {1.0, 0.0, 0.0, -60.0, 360.0, -720.0};
  const cd iw(0.0, w);
  const cd e = std::exp(iw);
  cd acc = 0.0, denom = iw;
  double sign = 1.0;
  for (int k = 0; k < 6; ++k) {
    acc += sign * (p1[k] * e - p0[k]) / denom;
    denom *= iw;
    sign = -sign;
  }
  return 2.0 * acc.real();
}

double cutoff(double y) {
  if (y <= 0.5) return 1.0;
  if (y >= 1.0) return 0.0;
  const double z = 2.0 * y - 1.0;
  return 1.0 - z * z * z * (10.0 + z * (-15.0 + 6.0 * z));
}

double cutoff_d1(double y) {
  if (y <= 0.5 || y >= 1.0) return 0.0;
  const double z = 2.0 * y - 1.0;
  return -60.0 * z * z * (1.0 - z) * (1.0 - z);
}

// ------------------------------------------------------------ builtins

const std::vector<BuiltinInfo>& builtin_catalog() {
  static const std::vector<BuiltinInfo> cat{
      {"gaussian", "m,s", "0,1", "exp(-(x-m)^2/(2 s^2)); closed-form transform"},
      {"c2_bump", "center,halfwidth", "0,1", "(1-y^2)^3 on |y|<1, y=(x-center)/halfwidth; C2, transform by quadrature"},
      {"indicator", "a,b", "0,1", "indicator of [a,b); closed-form transform"},
      {"tent", "a,b", "-1,1", "triangle of height 1 on [a,b]; closed-form transform"},
      {"mollified_indicator", "a,b,eps", "0,1,0.05", "indicator of [a,b] convolved with the C2 bump of width eps"},
  };
  return cat;
}

namespace {

TestFunction make_gaussian(double m, double s) {
  if (!(s > 0.0) || !std::isfinite(m) || !std::isfinite(s)) throw ParameterError("gaussian: need s > 0");
  TestFunction t;
  t.name = call_name("gaussian", {m, s});
  const double inv2 = 1.0 / (s * s);
  t.f = [=](double x) { return std::exp(-0.5 * (x - m) * (x - m) * inv2); };
  t.d1 = [=](double x) { return -(x - m) * inv2 * std::exp(-0.5 * (x - m) * (x - m) * inv2); };
  t.d2 = [=](double x) {
    const double d = x - m;
    return (d * d * inv2 - 1.0) * inv2 * std::exp(-0.5 * d * d * inv2);
  };
  const double amp = s * std::sqrt(2.0 * kPi) / kPi;
  t.fourier = [=](double xi) { return amp * std::exp(-0.5 * s * s * xi * xi) * std::polar(1.0, -xi * m); };
  t.closed_form_fourier = true;
  t.radius = [=](double eps) { return gaussian_radius(m, s, eps); };
  t.envelope = DecayEnvelope{1.0, 1.0};
  t.smoothness = Smoothness::smooth;
  t.length_scale = s;
  return t;
}

TestFunction make_c2_bump(double c, double h) {
  if (!(h > 0.0) || !std::isfinite(c)) throw ParameterError("c2_bump: need halfwidth > 0");
  TestFunction t;
  t.name = call_name("c2_bump", {c, h});
  t.f = [=](double x) {
    const double y = (x - c) / h;
    if (std::fabs(y) >= 1.0) return 0.0;
    const double q = 1.0 - y * y;
    return q * q * q;
  };
  t.d1 = [=](double x) {
    const double y = (x - c) / h;
    if (std::fabs(y) >= 1.0) return 0.0;
    const double q = 1.0 - y * y;
    return -6.0 * y * q * q / h;
  };
  t.d2 = [=](double x) {
    const double y = (x - c) / h;
    if (std::fabs(y) >= 1.0) return 0.0;
    return -6.0 * (1.0 - y * y) * (1.0 - 5.0 * y * y) / (h * h);
  };
  t.support = std::make_pair(c - h, c + h);
  t.radius = fixed_radius(std::max(std::fabs(c - h), std::fabs(c + h)));
  t.smoothness = Smoothness::c2;
  t.length_scale = h;
  t.closed_form_fourier = false;
  return t;
}

TestFunction make_indicator(double a, double b) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) throw ParameterError("indicator: need a < b");
  TestFunction t;
  t.name = call_name("indicator", {a, b});
  t.f = [=](double x) { return (x >= a && x < b) ? 1.0 : 0.0; };
  t.d1 = [](double) { return 0.0; };
  t.d2 = [](double) { return 0.0; };
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  t.fourier = [=](double xi) { return (2.0 * h / kPi) * sinc(xi * h) * std::polar(1.0, -xi * c); };
  t.closed_form_fourier = true;
  t.jumps = {{a, 1.0}, {b, -1.0}};
  t.support = std::make_pair(a, b);
  t.radius = fixed_radius(std::max(std::fabs(a), std::fabs(b)));
  t.smoothness = Smoothness::discontinuous;
  t.length_scale = b - a;
  return t;
}

TestFunction make_tent(double a, double b) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) throw ParameterError("tent: need a < b");
  TestFunction t;
  t.name = call_name("tent", {a, b});
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  t.f = [=](double x) { return std::max(0.0, 1.0 - std::fabs(x - c) / h); };
  t.d1 = [=](double x) {
    if (x <= a || x >= b) return 0.0;
    return x < c ? 1.0 / h : -1.0 / h;
  };
  t.d2 = [](double) { return 0.0; };
  t.fourier = [=](double xi) {
    const double s = sinc(0.5 * xi * h);
    return (h / kPi) * s * s * std::polar(1.0, -xi * c);
  };
  t.closed_form_fourier = true;
  t.d1_jumps = {{a, 1.0 / h}, {c, -2.0 / h}, {b, 1.0 / h}};
  t.support = std::make_pair(a, b);
  t.radius = fixed_radius(std::max(std::fabs(a), std::fabs(b)));
  t.smoothness = Smoothness::lipschitz;
  t.length_scale = h;
  return t;
}

TestFunction make_mollified_indicator(double a, double b, double eps) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) throw ParameterError("mollified_indicator: need a < b");
  if (!(eps > 0.0)) throw ParameterError("mollified_indicator: need eps > 0");
  TestFunction ind = make_indicator(a, b);
  TestFunction t;
  t.name = call_name("mollified_indicator", {a, b, eps});
  t.f = [=](double x) { return bump_cdf((x - a) / eps) - bump_cdf((x - b) / eps); };
  t.d1 = [=](double x) { return (bump((x - a) / eps) - bump((x - b) / eps)) / eps; };
  t.d2 = [=](double x) { return (bump_d1((x - a) / eps) - bump_d1((x - b) / eps)) / (eps * eps); };
  auto ind_hat = ind.fourier;
  t.fourier = [=](double xi) { return ind_hat(xi) * bump_transform(eps * xi); };
  t.closed_form_fourier = true;
  t.support = std::make_pair(a - eps, b + eps);
  t.radius = fixed_radius(std::max(std::fabs(a - eps), std::fabs(b + eps)));
  t.smoothness = Smoothness::c2;
  t.length_scale = std::min(b - a, eps);
  return t;
}

}  // namespace

TestFunction builtin(const std::string& name, const std::vector<double>& params) {
  auto need = [&](std::size_t n) {
    if (params.size() != n) {
      throw ParameterError(name + ": expected " + std::to_string(n) + " parameters, got " +
                           std::to_string(params.size()));
    }
  };
  TestFunction t;
  if (name == "gaussian") {
    need(2);
    t = make_gaussian(params[0], params[1]);
  } else if (name == "c2_bump") {
    need(2);
    t = make_c2_bump(params[0], params[1]);
  } else if (name == "indicator") {
    need(2);
    t = make_indicator(params[0], params[1]);
  } else if (name == "tent") {
    need(2);
    t = make_tent(params[0], params[1]);
  } else if (name == "mollified_indicator") {
    need(3);
    t = make_mollified_indicator(params[0], params[1], params[2]);
  } else {
    throw ParameterError("unknown test function '" + name + "'");
  }
  if (!t.fourier) {
    const TestFunction copy = t;
    t.fourier = [copy](double xi) { return fourier_quadrature(copy, xi); };
  }
  return t;
}

TestFunction parse_function(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  std::string plist;
  if (colon == std::string::npos) {
    auto it = std::find_if(builtin_catalog().begin(), builtin_catalog().end(),
                           [&](const BuiltinInfo& b) { return b.name == name; });
    if (it == builtin_catalog().end()) throw ParameterError("unknown test function '" + name + "'");
    plist = it->defaults;
  } else {
    plist = spec.substr(colon + 1);
  }
  std::vector<double> params;
  std::stringstream ss(plist);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      params.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ParameterError("bad parameter '" + item + "' in '" + spec + "'");
    }
  }
  return builtin(name, params);
}

// ------------------------------------------------------- combinators

TestFunction scaled(const TestFunction& f, double a) { return linear_combination(a, f, 0.0, f); }

TestFunction linear_combination(double a, const TestFunction& f, double b, const TestFunction& g) {
  TestFunction t;
  std::ostringstream os;
  os << fmt(a) << "*" << f.name << "+" << fmt(b) << "*" << g.name;
  t.name = os.str();
  const bool use_f = a != 0.0, use_g = b != 0.0;
  t.f = [=, ff = f.f, gf = g.f](double x) { return (use_f ? a * ff(x) : 0.0) + (use_g ? b * gf(x) : 0.0); };
  t.d1 = [=, ff = f.d1, gf = g.d1](double x) { return (use_f ? a * ff(x) : 0.0) + (use_g ? b * gf(x) : 0.0); };
  t.d2 = [=, ff = f.d2, gf = g.d2](double x) { return (use_f ? a * ff(x) : 0.0) + (use_g ? b * gf(x) : 0.0); };
  t.fourier = [=, ff = f.fourier, gf = g.fourier](double xi) {
    return (use_f ? a * ff(xi) : cd(0.0)) + (use_g ? b * gf(xi) : cd(0.0));
  };
  t.closed_form_fourier = (!use_f || f.closed_form_fourier) && (!use_g || g.closed_form_fourier);
  for (const auto& j : f.jumps) if (use_f) t.jumps.push_back({j.x, a * j.size});
  for (const auto& j : g.jumps) if (use_g) t.jumps.push_back({j.x, b * j.size});
  for (const auto& j : f.d1_jumps) if (use_f) t.d1_jumps.push_back({j.x, a * j.size});
  for (const auto& j : g.d1_jumps) if (use_g) t.d1_jumps.push_back({j.x, b * j.size});
  if (!use_f && !use_g) {
    t.support = std::make_pair(0.0, 0.0);
  } else if ((!use_f || f.support) && (!use_g || g.support)) {
    double lo = kInf, hi = -kInf;
    if (use_f) lo = std::min(lo, f.support->first), hi = std::max(hi, f.support->second);
    if (use_g) lo = std::min(lo, g.support->first), hi = std::max(hi, g.support->second);
    t.support = std::make_pair(lo, hi);
  }
  t.radius = [=, fr = f.radius, gr = g.radius](double eps) {
    double r = 0.0;
    if (use_f) r = std::max(r, fr(eps / (2.0 * std::fabs(a))));
    if (use_g) r = std::max(r, gr(eps / (2.0 * std::fabs(b))));
    return r;
  };
  t.smoothness = std::max(use_f ? f.smoothness : Smoothness::smooth, use_g ? g.smoothness : Smoothness::smooth);
  t.length_scale = std::min(use_f ? f.length_scale : kInf, use_g ? g.length_scale : kInf);
  if (!std::isfinite(t.length_scale)) t.length_scale = 1.0;
  return t;
}

TestFunction shifted(const TestFunction& f, double a) {
  TestFunction t = f;
  t.name = f.name + ".shift(" + fmt(a) + ")";
  t.f = [a, h = f.f](double x) { return h(x - a); };
  t.d1 = [a, h = f.d1](double x) { return h(x - a); };
  t.d2 = [a, h = f.d2](double x) { return h(x - a); };
  t.fourier = [a, h = f.fourier](double xi) { return std::polar(1.0, -xi * a) * h(xi); };
  for (auto& j : t.jumps) j.x += a;
  for (auto& j : t.d1_jumps) j.x += a;
  if (t.support) t.support = std::make_pair(t.support->first + a, t.support->second + a);
  t.radius = [a, r = f.radius](double eps) { return r(eps) + std::fabs(a); };
  t.envelope.reset();
  return t;
}

TestFunction dilated(const TestFunction& f, double c) {
  if (!(c > 0.0)) throw ParameterError("dilated: need c > 0");
  TestFunction t = f;
  t.name = f.name + ".dilate(" + fmt(c) + ")";
  t.f = [c, h = f.f](double x) { return h(x / c); };
  t.d1 = [c, h = f.d1](double x) { return h(x / c) / c; };
  t.d2 = [c, h = f.d2](double x) { return h(x / c) / (c * c); };
  t.fourier = [c, h = f.fourier](double xi) { return c * h(c * xi); };
  for (auto& j : t.jumps) j.x *= c;
  for (auto& j : t.d1_jumps) j.x *= c, j.size /= c;
  if (t.support) t.support = std::make_pair(t.support->first * c, t.support->second * c);
  t.radius = [c, r = f.radius](double eps) { return c * r(eps * std::min(1.0, c * c)); };
  t.length_scale = f.length_scale * c;
  t.envelope.reset();
  return t;
}

// ------------------------------------------------------------ Fourier

std::complex<double> fourier_quadrature(const TestFunction& f, double xi) {
  auto [lo, hi] = f.range(1e-17);
  if (!(hi > lo)) return 0.0;
  double width = 0.5 * f.length_scale;
  if (xi != 0.0) width = std::min(width, 2.0 / std::fabs(xi));
  auto integrand = [&](double x) { return f.f(x) * std::polar(1.0, -xi * x); };
  return quad::panels_gl(integrand, lo, hi, width, f.breakpoints()) / kPi;
}

HHalf h_half_inner(const TestFunction& f, const TestFunction& g) {
  auto integrand = [&](double u) { return 2.0 * u * std::real(f.fourier(u) * std::conj(g.fourier(u))); };
  const double e = std::max(extent(f), extent(g));
  const double w = kPi / (2.0 * (e + 1.0));
  double xi = 16.0 / std::min(f.length_scale, g.length_scale);

  CompensatedSum total;
  total.add(freq_integral(integrand, 0.0, xi, w));
  double prev = std::numeric_limits<double>::quiet_NaN();
  int flat_steps = 0;
  for (int k = 0; k < 40; ++k) {
    const double d = freq_integral(integrand, xi, 2.0 * xi, w, std::fabs(total.value()));
    total.add(d);
    const double value = total.value();
    if (d == 0.0 && (std::isnan(prev) || prev == 0.0)) {
      if (k >= 1) return {value, false};
    } else if (!std::isnan(prev) && prev != 0.0) {
      const double r = std::fabs(d / prev);
      // A c/u tail adds c log 2 per doubling: ratio near 1 means divergence.
      if (d > 0.0 && prev > 0.0 && r >= 0.9 && r <= 1.12) {
        if (++flat_steps >= 2) return {value, true};
      } else {
        flat_steps = 0;
      }
      if (r < 0.9) {
        const double tail = std::fabs(d) * r / (1.0 - r);
        if (std::fabs(d) + tail <= 1e-8 * std::fabs(value) || std::fabs(d) + tail < 1e-15) {
          const double signed_tail = (d > 0) == (prev > 0) ? std::copysign(tail, d) : 0.0;
          return {value + signed_tail, false};
        }
      }
    }
    prev = d;
    xi *= 2.0;
  }
  throw AccuracyError("h_half_inner: tail neither converged nor showed a logarithmic divergence for " + f.name +
                      ", " + g.name);
}

namespace {

// integral of h'_ac(y) log|x - y| dy over the range of h.
double log_potential(const TestFunction& h, double x, const std::vector<double>& cuts) {
  auto [lo, hi] = h.range(1e-17);
  if (!(hi > lo)) return 0.0;
  std::vector<double> c = cuts;
  c.push_back(x);
  const auto pts = quad::split_points(lo, hi, c);
  boost::math::quadrature::tanh_sinh<double> ts;
  CompensatedSum s;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    auto integrand = [&](double y) {
      const double d = std::fabs(x - y);
      return d == 0.0 ? 0.0 : h.d1(y) * std::log(d);
    };
    s.add(ts.integrate(integrand, pts[i], pts[i + 1], 1e-11));
  }
  return s.value();
}

}  // namespace

HHalf h_half_logkernel(const TestFunction& f, const TestFunction& g) {
  for (const auto& a : f.jumps) {
    for (const auto& b : g.jumps) {
      if (std::fabs(a.x - b.x) < 1e-14 && a.size * b.size != 0.0) return {kInf, true};
    }
  }
  std::vector<double> cuts = f.breakpoints();
  for (double b : g.breakpoints()) cuts.push_back(b);

  CompensatedSum total;
  auto [lo, hi] = f.range(1e-17);
  if (hi > lo) {
    const auto pts = quad::split_points(lo, hi, cuts);
    boost::math::quadrature::tanh_sinh<double> ts;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      auto outer = [&](double x) {
        const double fx = f.d1(x);
        return fx == 0.0 ? 0.0 : fx * log_potential(g, x, cuts);
      };
      total.add(ts.integrate(outer, pts[i], pts[i + 1], 1e-10));
    }
  }
  for (const auto& a : f.jumps) total.add(a.size * log_potential(g, a.x, cuts));
  for (const auto& b : g.jumps) total.add(b.size * log_potential(f, b.x, cuts));
  for (const auto& a : f.jumps) {
    for (const auto& b : g.jumps) total.add(a.size * b.size * std::log(std::fabs(a.x - b.x)));
  }
  return {-2.0 / (kPi * kPi) * total.value(), false};
}

double sigma_t_sq(const TestFunction& f, double lambda) {
  if (!(lambda >= 0.0)) throw ParameterError("sigma_t_sq: lambda must be >= 0");
  if (lambda == 0.0) return 0.0;
  auto integrand = [&](double u) { return 2.0 * u * std::norm(f.fourier(u)); };
  const double w = kPi / (2.0 * (extent(f) + 1.0));
  return freq_integral(integrand, 0.0, lambda, w);
}

// ------------------------------------------------- variation and norms

TotalVariation weighted_tv(const TestFunction& f, TvTarget which, TvWeight w) {
  const bool weighted = w == TvWeight::log_weighted;
  if (which == TvTarget::f1 && !f.jumps.empty()) return {kInf, false};
  const auto& h = which == TvTarget::f ? f.d1 : f.d2;
  const auto& atoms = which == TvTarget::f ? f.jumps : f.d1_jumps;
  TotalVariation tv = abs_integral(f, h, weighted);
  tv.value += sum_abs_atoms(atoms, weighted);
  return tv;
}

NormBundle norms(const TestFunction& f) {
  NormBundle n;
  n.l1_f = abs_integral(f, f.f, false).value;
  n.xlog_f = abs_integral(f, f.f, true).value;
  const auto tv0 = weighted_tv(f, TvTarget::f, TvWeight::none);
  const auto tv0w = weighted_tv(f, TvTarget::f, TvWeight::log_weighted);
  const auto tv1 = weighted_tv(f, TvTarget::f1, TvWeight::none);
  const auto tv1w = weighted_tv(f, TvTarget::f1, TvWeight::log_weighted);
  n.l1_f1 = tv0.bounded ? tv0.value : kInf;
  n.xlog_f1 = tv0w.bounded ? tv0w.value : kInf;
  n.l1_f2 = tv1.bounded ? tv1.value : kInf;
  n.xlog_f2 = tv1w.bounded ? tv1w.value : kInf;
  return n;
}

// -------------------------------------------------------- mollifier

TestFunction mollify(const TestFunction& f, double eps) {
  if (!(eps > 0.0)) throw ParameterError("mollify: eps must be > 0");
  TestFunction t;
  t.name = "mollify(" + f.name + "," + fmt(eps) + ")";
  const auto brk = f.breakpoints();
  const double panel = std::min(2.0, f.length_scale / (4.0 * eps));
  auto conv = [fn = f.f, brk, eps, panel](double x, double (*kernel)(double)) {
    std::vector<double> cuts{0.0};
    for (double b : brk) cuts.push_back((x - b) / eps);
    auto integrand = [&](double y) { return fn(x - eps * y) * kernel(y); };
    return quad::panels_gl(integrand, -1.0, 1.0, panel, cuts);
  };
  t.f = [conv](double x) { return conv(x, bump); };
  t.d1 = [conv, eps](double x) { return conv(x, bump_d1) / eps; };
  t.d2 = [conv, eps](double x) { return conv(x, bump_d2) / (eps * eps); };
  t.fourier = [fh = f.fourier, eps](double xi) { return fh(xi) * bump_transform(eps * xi); };
  t.closed_form_fourier = f.closed_form_fourier;
  if (f.support) t.support = std::make_pair(f.support->first - eps, f.support->second + eps);
  t.radius = [r = f.radius, eps](double e) { return r(e * eps * eps / 8.0) + eps; };
  t.smoothness = f.smoothness == Smoothness::smooth ? Smoothness::smooth : Smoothness::c2;
  t.length_scale = f.smoothness == Smoothness::smooth ? f.length_scale : std::min(f.length_scale, 2.0 * eps);
  return t;
}

// ------------------------------------------------------- hypotheses

HypothesisReport check_hypotheses(const TestFunction& f) {
  HypothesisReport r;
  auto note = [&](const std::string& k, const std::string& v) { r.details.emplace_back(k, v); };

  if (f.support) {
    r.decay_ok = true;
    note("decay", "compact support [" + fmt(f.support->first) + ", " + fmt(f.support->second) + "]");
  } else {
    // sup of |f|, |f'|, |f''| at +-x must fall at least like |x|^-2.1
    const double base = f.radius(1e-6);
    std::vector<double> m;
    for (double k : {2.0, 4.0, 8.0, 16.0}) {
      const double x = k * base;
      double v = 0.0;
      for (double s : {-1.0, 1.0}) {
        v = std::max({v, std::fabs(f.f(s * x)), std::fabs(f.d1(s * x)), std::fabs(f.d2(s * x))});
      }
      m.push_back(v);
    }
    r.decay_ok = true;
    for (std::size_t i = 1; i < m.size(); ++i) {
      if (m[i] > 1e-300 && m[i] > m[i - 1] * std::pow(2.0, -2.1)) r.decay_ok = false;
    }
    note("decay", "sup |f|,|f'|,|f''| at 2R..16R: " + fmt(m[0]) + " .. " + fmt(m.back()));
  }

  const auto tv1 = weighted_tv(f, TvTarget::f1);
  r.bv_f1_ok = tv1.bounded && std::isfinite(tv1.value);
  note("bv_f1", r.bv_f1_ok ? "weighted variation of f' = " + fmt(tv1.value) : "f' has unbounded variation");
  const auto tv0 = weighted_tv(f, TvTarget::f);
  r.bv_f_ok = tv0.bounded && std::isfinite(tv0.value);
  note("bv_f", r.bv_f_ok ? "weighted variation of f = " + fmt(tv0.value) : "f has unbounded variation");

  // xi |fhat|^2 and its derivative should be O(1/xi) on [10, 1000]
  auto h = [&](double xi) { return xi * std::norm(f.fourier(xi)); };
  double sup_lo = 0.0, sup_hi = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double xi = 10.0 * std::pow(10.0, 2.0 * i / 400.0);
    const double step = 1e-4 * std::max(1.0, xi / 100.0);
    const double v = xi * std::fabs(h(xi));
    const double dv = xi * std::fabs((h(xi + step) - h(xi - step)) / (2.0 * step));
    const double worst = std::max(v, dv);
    (xi <= 100.0 ? sup_lo : sup_hi) = std::max(xi <= 100.0 ? sup_lo : sup_hi, worst);
  }
  r.fourier_decay_ok = sup_hi <= 2.0 * sup_lo + 1e-12;
  note("fourier_decay", "sup xi*(|xi fhat^2|, |(xi fhat^2)'|) on [10,100]: " + fmt(sup_lo) + ", on [100,1000]: " +
                            fmt(sup_hi));

  try {
    const HHalf hh = h_half_inner(f, f);
    r.h_half_finite = !hh.divergent;
    note("h_half", hh.divergent ? "divergent (logarithmic tail)" : "norm^2 = " + fmt(hh.value));
  } catch (const AccuracyError& e) {
    r.h_half_finite = false;
    note("h_half", e.what());
  }
  return r;
}

// ------------------------------------------- almost-analytic extension

namespace {

// integral_0^1 cutoff(y) y^2 / (d^2 + y^2) dy
double kernel_k1(double d) {
  const double a = std::fabs(d);
  const double head = a == 0.0 ? 0.5 : 0.5 - a * std::atan(0.5 / a);
  auto tail = [a](double y) { return cutoff(y) * y * y / (a * a + y * y); };
  return head + quad::gl20(tail, 0.5, 1.0);
}

// integral_{1/2}^1 y cutoff'(y) / (d^2 + y^2) dy
double kernel_k2(double d) {
  auto integrand = [d](double y) { return y * cutoff_d1(y) / (d * d + y * y); };
  return quad::gl20(integrand, 0.5, 1.0);
}

}  // namespace

double hs_reconstruct(const TestFunction& f, double q, double tol) {
  if (!(tol >= 1e-6)) throw ParameterError("hs_reconstruct: tol must be >= 1e-6");
  if (!f.jumps.empty()) throw DomainError("hs_reconstruct: f must be continuous");
  auto [lo, hi] = f.range(1e-16);
  if (!(hi > lo)) return 0.0;
  auto integrand = [&](double x) {
    const double d = q - x;
    return -f.d2(x) * kernel_k1(d) - (f.f(x) + d * f.d1(x)) * kernel_k2(d);
  };
  auto cuts = f.breakpoints();
  cuts.push_back(q);
  double err = 0.0;
  CompensatedSum s;
  s.add(quad::panels(integrand, lo, hi, 0.25 * f.length_scale, cuts, 1e-12, &err));
  for (const auto& j : f.d1_jumps) s.add(-j.size * kernel_k1(q - j.x));
  if (err / kPi > 0.1 * tol) throw AccuracyError("hs_reconstruct: quadrature error estimate above tolerance");
  return s.value() / kPi;
}

KernelIdentity exponential_kernel_identity(const TestFunction& f, double delta) {
  if (!f.jumps.empty()) throw DomainError("exponential_kernel_identity: f must be continuous");
  if (!(delta > 0.0)) throw ParameterError("exponential_kernel_identity: delta must be > 0");
  auto [lo, hi] = f.range(1e-17);
  const auto cuts = f.breakpoints();
  const double width = std::min(0.25 * f.length_scale, 2.0 / delta);
  auto phase = [delta](double x) { return std::polar(1.0, -delta * x); };
  cd f0 = 0.0, f1 = 0.0, f2 = 0.0;
  if (hi > lo) {
    f0 = quad::panels([&](double x) { return f.f(x) * phase(x); }, lo, hi, width, cuts, 1e-13);
    f1 = quad::panels([&](double x) { return f.d1(x) * phase(x); }, lo, hi, width, cuts, 1e-13);
    f2 = quad::panels([&](double x) { return f.d2(x) * phase(x); }, lo, hi, width, cuts, 1e-13);
  }
  for (const auto& j : f.d1_jumps) f2 += j.size * phase(j.x);

  auto ex = [delta](double y) { return std::exp(-delta * y); };
  const double y1 = quad::adaptive([&](double y) { return y * ex(y); }, 0.0, 0.5, 1e-14) +
                    quad::adaptive([&](double y) { return y * cutoff(y) * ex(y); }, 0.5, 1.0, 1e-14);
  const double y2 = quad::adaptive([&](double y) { return cutoff_d1(y) * ex(y); }, 0.5, 1.0, 1e-14);
  const double y3 = quad::adaptive([&](double y) { return y * cutoff_d1(y) * ex(y); }, 0.5, 1.0, 1e-14);

  KernelIdentity k;
  k.lhs = (f2 * y1 + f0 * y2 - cd(0.0, 1.0) * f1 * y3) / kPi;
  k.rhs = -f.fourier(delta);
  return k;
}

}  // namespace mesozeta
