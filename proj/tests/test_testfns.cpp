#include <cmath>

#include <doctest.h>
#include "mesozeta/errors.hpp"
#include "mesozeta/quadrature.hpp"
#include "mesozeta/testfns.hpp"

using namespace mesozeta;

namespace {
constexpr double kPi = 3.14159265358979323846;

double sup_diff(const TestFunction& a, const TestFunction& b, double lo, double hi) {
  double m = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double x = lo + (hi - lo) * i / 400.0;
    m = std::max(m, std::fabs(a.f(x) - b.f(x)));
  }
  return m;
}
}  // namespace

TEST_CASE("builtin transforms") {
  auto g = builtin("gaussian", {0, 1});
  CHECK(g.fourier(0).real() == doctest::Approx(0.7978845608).epsilon(1e-9));
  CHECK(std::abs(g.fourier(1.5) - std::sqrt(2 / kPi) * std::exp(-1.125)) < 1e-15);
  auto ind = builtin("indicator", {-1, 1});
  CHECK(ind.fourier(0).real() == doctest::Approx(2 / kPi).epsilon(1e-14));
  CHECK(std::abs(ind.fourier(0.7) - 2 * std::sin(0.7) / (kPi * 0.7)) < 1e-15);
  // c2_bump against an independent high-precision quadrature
  auto b = builtin("c2_bump", {0, 1});
  CHECK(b.fourier(0).real() == doctest::Approx(0.291026181653751).epsilon(1e-12));
  CHECK(b.fourier(3).real() == doctest::Approx(0.172087279057761).epsilon(1e-12));
  CHECK(std::abs(b.fourier(10).real() + 0.00120690412048698) < 1e-13);
  CHECK(b.integral() == doctest::Approx(32.0 / 35).epsilon(1e-12));
}

TEST_CASE("closed-form transforms match quadrature on a 50-point grid") {
  for (const char* spec : {"gaussian:0,1", "gaussian:1.5,0.4", "indicator:0,1", "tent:-1,1", "tent:0.5,3",
                           "mollified_indicator:0,1,0.05"}) {
    auto f = parse_function(spec);
    REQUIRE(f.closed_form_fourier);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const double xi = -20.0 + 40.0 * i / 49.0;
      worst = std::max(worst, std::abs(f.fourier(xi) - fourier_quadrature(f, xi)));
    }
    INFO(spec);
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("parameter errors") {
  CHECK_THROWS_AS(builtin("gaussian", {0, 0}), ParameterError);
  CHECK_THROWS_AS(builtin("indicator", {1, 1}), ParameterError);
  CHECK_THROWS_AS(builtin("tent", {2, 1}), ParameterError);
  CHECK_THROWS_AS(builtin("mollified_indicator", {0, 1, 0}), ParameterError);
  CHECK_THROWS_AS(builtin("c2_bump", {0, -1}), ParameterError);
  CHECK_THROWS_AS(builtin("nope", {}), ParameterError);
  CHECK_THROWS_AS(parse_function("gaussian:0,x"), ParameterError);
  CHECK_THROWS_AS(parse_function("gaussian:0"), ParameterError);
  CHECK(parse_function("tent").name == "tent(-1,1)");
  CHECK(parse_function("gaussian:0,2e-1").length_scale == doctest::Approx(0.2));
}

TEST_CASE("linearity, scaling, shift") {
  auto g = builtin("gaussian", {0, 1});
  auto t = builtin("tent", {-1, 1});
  auto lc = linear_combination(2.0, g, -0.5, t);
  auto d = dilated(g, 3.0);
  auto s = shifted(g, 0.7);
  for (int i = 0; i < 50; ++i) {
    const double xi = -10.0 + 20.0 * i / 49.0;
    CHECK(std::abs(lc.fourier(xi) - (2.0 * g.fourier(xi) - 0.5 * t.fourier(xi))) < 1e-8);
    CHECK(std::abs(fourier_quadrature(lc, xi) - lc.fourier(xi)) < 1e-8);
    CHECK(std::abs(d.fourier(xi) - 3.0 * g.fourier(3.0 * xi)) < 1e-8);
    CHECK(std::abs(fourier_quadrature(d, xi) - d.fourier(xi)) < 1e-8);
    CHECK(std::abs(fourier_quadrature(s, xi) - s.fourier(xi)) < 1e-8);
  }
  for (double xi : {0.0, 0.3, 2.0}) CHECK(std::abs(scaled(g, 0.0).fourier(xi)) == 0.0);
}

TEST_CASE("transform at zero is the integral over pi") {
  for (const char* spec : {"gaussian:0.3,2", "c2_bump:1,0.5", "indicator:-2,5", "tent:0,4"}) {
    auto f = parse_function(spec);
    auto [lo, hi] = f.range(1e-17);
    const double direct = quad::panels(f.f, lo, hi, 0.25 * f.length_scale, f.breakpoints(), 1e-13);
    CHECK(f.fourier(0).real() == doctest::Approx(direct / kPi).epsilon(1e-10));
  }
}

TEST_CASE("Plancherel constant for the gaussian") {
  auto g = builtin("gaussian", {0, 1});
  const double v = quad::panels([&](double xi) { return std::norm(fourier_quadrature(g, xi)); }, -12, 12, 0.5, {},
                                1e-13);
  CHECK(v == doctest::Approx(2 / std::sqrt(kPi)).epsilon(1e-6));
}

TEST_CASE("H^1/2 inner product") {
  auto g = builtin("gaussian", {0, 1});
  auto t = builtin("tent", {-1, 1});
  auto ind = builtin("indicator", {0, 1});
  auto gg = h_half_inner(g, g);
  CHECK_FALSE(gg.divergent);
  CHECK(std::fabs(gg.value - 2 / kPi) < 1e-6);
  // integral_0^inf sin^4 v / v^3 dv = log 2
  auto tt = h_half_inner(t, t);
  CHECK_FALSE(tt.divergent);
  CHECK(tt.value == doctest::Approx(8 * std::log(2.0) / (kPi * kPi)).epsilon(1e-6));
  auto gt = h_half_inner(g, t), tg = h_half_inner(t, g);
  CHECK(gt.value == doctest::Approx(tg.value).epsilon(1e-12));
  CHECK(h_half_inner(ind, ind).divergent);
  // independent double quadrature of the log-kernel form
  CHECK(h_half_inner(builtin("c2_bump", {0, 1}), builtin("c2_bump", {0, 1})).value ==
        doctest::Approx(0.691685946998359).epsilon(1e-8));
  for (const char* spec : {"c2_bump:0,1", "mollified_indicator:0,1,0.05", "gaussian:2,0.5"}) {
    auto f = parse_function(spec);
    auto v = h_half_inner(f, f);
    CHECK_FALSE(v.divergent);
    CHECK(v.value >= 0.0);
  }
}

TEST_CASE("log-kernel form agrees with the Fourier form") {
  auto g = builtin("gaussian", {0, 1});
  auto t = builtin("tent", {-1, 1});
  CHECK(h_half_logkernel(g, g).value == doctest::Approx(2 / kPi).epsilon(1e-5));
  CHECK(h_half_logkernel(t, g).value == doctest::Approx(h_half_inner(t, g).value).epsilon(1e-4));
  auto b = builtin("c2_bump", {0.5, 1.5});
  CHECK(h_half_logkernel(b, b).value == doctest::Approx(h_half_inner(b, b).value).epsilon(1e-5));
  auto zero = scaled(g, 0.0);
  CHECK(h_half_logkernel(zero, zero).value == 0.0);
  CHECK(h_half_logkernel(zero, g).value == 0.0);
  // the seminorm is dilation invariant
  auto wide = dilated(g, 1e3);
  CHECK(h_half_logkernel(wide, wide).value == doctest::Approx(2 / kPi).epsilon(1e-5));
  CHECK(h_half_inner(wide, wide).value == doctest::Approx(2 / kPi).epsilon(1e-6));
  auto ind = builtin("indicator", {0, 1});
  CHECK(h_half_logkernel(ind, ind).divergent);
}

TEST_CASE("sigma_t squared") {
  auto g = builtin("gaussian", {0, 1});
  CHECK(sigma_t_sq(g, 0) == 0.0);
  CHECK(std::fabs(sigma_t_sq(g, 10) - 2 / kPi) < 1e-6);
  CHECK(sigma_t_sq(g, 1.3) == doctest::Approx(2 / kPi * (1 - std::exp(-1.69))).epsilon(1e-10));
  CHECK_THROWS_AS(sigma_t_sq(g, -1), ParameterError);

  // (8/pi^2) integral_0^L sin^2(u/2)/u du = (4/pi^2)(gamma + log L - Ci(L))
  auto ind = builtin("indicator", {0, 1});
  CHECK(sigma_t_sq(ind, 1000) == doctest::Approx(3.03320956918862).epsilon(1e-8));
  const double slope = 4 / (kPi * kPi);
  double cs[3];
  int i = 0;
  for (double lam : {10.0, 100.0, 1000.0}) cs[i++] = sigma_t_sq(ind, lam) - slope * std::log(lam);
  const double c = (cs[0] + cs[1] + cs[2]) / 3;
  i = 0;
  for (double lam : {10.0, 100.0, 1000.0}) {
    const double v = sigma_t_sq(ind, lam);
    CHECK(std::fabs(v - (slope * std::log(lam) + c)) <= 0.02 * v);
    ++i;
  }
}

TEST_CASE("weighted total variation") {
  auto ind = builtin("indicator", {0, 1});
  auto tv = weighted_tv(ind, TvTarget::f);
  CHECK(tv.bounded);
  CHECK(tv.value == doctest::Approx(2.0).epsilon(1e-14));
  CHECK_FALSE(weighted_tv(ind, TvTarget::f1).bounded);

  auto g = builtin("gaussian", {0, 1});
  CHECK(weighted_tv(g, TvTarget::f).value == doctest::Approx(3.28816457020713).epsilon(1e-6));
  CHECK(weighted_tv(g, TvTarget::f1).value == doctest::Approx(4.54205415450895).epsilon(1e-6));
  CHECK(weighted_tv(g, TvTarget::f, TvWeight::none).value == doctest::Approx(2.0).epsilon(1e-10));
  auto b = builtin("c2_bump", {3, 2});
  CHECK(weighted_tv(b, TvTarget::f, TvWeight::none).value == doctest::Approx(2.0).epsilon(1e-10));
  auto t = builtin("tent", {-1, 1});
  CHECK(weighted_tv(t, TvTarget::f1).value == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("norm bundle") {
  auto g = builtin("gaussian", {0, 1});
  auto n = norms(g);
  CHECK(n.l1_f == doctest::Approx(std::sqrt(2 * kPi)).epsilon(1e-10));
  CHECK(n.l1_f1 == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(n.xlog_f1 == doctest::Approx(3.28816457020713).epsilon(1e-6));
  for (double v : {n.l1_f, n.l1_f1, n.l1_f2, n.xlog_f, n.xlog_f1, n.xlog_f2}) {
    CHECK(std::isfinite(v));
    CHECK(v >= 0);
  }
  CHECK(std::isinf(norms(builtin("indicator", {0, 1})).l1_f2));
}

TEST_CASE("bump and cutoff") {
  CHECK(bump_transform(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(bump_transform(1) == doctest::Approx(0.941847192370088).epsilon(1e-13));
  CHECK(bump_transform(2) == doctest::Approx(0.783010444629298).epsilon(1e-13));
  CHECK(bump_transform(-5) == doctest::Approx(0.149416985479036).epsilon(1e-13));
  CHECK(std::fabs(bump_transform(30) + 9.43504559939276e-05) < 1e-15);
  // both branches agree at the switch
  CHECK(std::fabs(bump_transform(1.9999999) - bump_transform(2.0000001)) < 1e-7);
  CHECK(bump_cdf(1) == 1.0);
  CHECK(bump_cdf(0) == doctest::Approx(0.5));
  CHECK(cutoff(0.3) == 1.0);
  CHECK(cutoff(0.75) == doctest::Approx(0.5));
  CHECK(cutoff(1.2) == 0.0);
}

TEST_CASE("mollification") {
  auto g = builtin("gaussian", {0, 1});
  auto m1 = mollify(g, 0.1);
  CHECK(m1.f(0.3) == doctest::Approx(0.955479977380941).epsilon(1e-12));
  auto [lo, hi] = m1.range(1e-17);
  const double mass = quad::panels(m1.f, lo, hi, 0.25, {}, 1e-13);
  CHECK(std::fabs(mass - g.integral()) < 1e-8);
  CHECK(std::fabs(m1.integral() - g.integral()) < 1e-12);
  const double d1 = sup_diff(mollify(g, 0.1), g, -4, 4);
  const double d2 = sup_diff(mollify(g, 0.05), g, -4, 4);
  CHECK(d2 / d1 < 0.6);
  CHECK(d2 / d1 > 0.2);
  CHECK_THROWS_AS(mollify(g, 0), ParameterError);

  // f_eps'' controlled by TV(f)/eps
  auto ind = builtin("indicator", {0, 1});
  const double eps = 0.05;
  auto mi = mollify(ind, eps);
  auto [a, b] = mi.range();
  const double l1 = quad::panels([&](double x) { return std::fabs(mi.d2(x)); }, a, b, 0.01, {-eps, 0, eps, 1 - eps, 1,
                                 1 + eps}, 1e-10);
  // the bound is attained: integral |bump'| = 2
  CHECK(l1 <= 2 * weighted_tv(ind, TvTarget::f, TvWeight::none).value / eps * (1 + 1e-9));
  // same as the builtin
  auto mb = builtin("mollified_indicator", {0, 1, eps});
  CHECK(sup_diff(mi, mb, -0.2, 1.2) < 1e-12);
  for (double xi : {0.0, 3.0, 40.0}) CHECK(std::abs(mi.fourier(xi) - fourier_quadrature(mi, xi)) < 1e-8);
}

TEST_CASE("hypothesis checks") {
  auto rg = check_hypotheses(builtin("gaussian", {0, 1}));
  CHECK(rg.decay_ok);
  CHECK(rg.bv_f1_ok);
  CHECK(rg.bv_f_ok);
  CHECK(rg.fourier_decay_ok);
  CHECK(rg.h_half_finite);
  CHECK(rg.covariance_admissible());

  auto ri = check_hypotheses(builtin("indicator", {0, 1}));
  CHECK(ri.normalized_admissible());
  CHECK_FALSE(ri.h_half_finite);
  CHECK_FALSE(ri.covariance_admissible());

  CHECK(check_hypotheses(builtin("tent", {-1, 1})).covariance_admissible());
  CHECK(check_hypotheses(builtin("c2_bump", {0, 1})).covariance_admissible());
  CHECK(check_hypotheses(builtin("mollified_indicator", {0, 1, 0.05})).covariance_admissible());
}

TEST_CASE("Helffer-Sjostrand reconstruction") {
  auto g = builtin("gaussian", {0, 1});
  CHECK(std::fabs(hs_reconstruct(g, 0, 1e-6) - 1.0) < 1e-6);
  for (double q : {-1.3, 0.4, 2.0}) CHECK(std::fabs(hs_reconstruct(g, q, 1e-6) - g.f(q)) < 1e-6);
  auto t = builtin("tent", {-1, 1});
  for (double q : {-0.5, 0.0, 0.25, 1.5}) CHECK(std::fabs(hs_reconstruct(t, q, 1e-6) - t.f(q)) < 1e-6);
  auto b = builtin("c2_bump", {0, 1});
  CHECK(std::fabs(hs_reconstruct(b, 0.3, 1e-6) - b.f(0.3)) < 1e-6);
  CHECK(hs_reconstruct(scaled(g, 0.0), 0.5, 1e-6) == 0.0);
  auto s = shifted(g, 1.7);
  CHECK(std::fabs(hs_reconstruct(s, 0.4 + 1.7, 1e-6) - hs_reconstruct(g, 0.4, 1e-6)) < 2e-6);
  CHECK_THROWS_AS(hs_reconstruct(builtin("indicator", {0, 1}), 0.5, 1e-6), DomainError);
  CHECK_THROWS_AS(hs_reconstruct(g, 0, 1e-8), ParameterError);
}

TEST_CASE("exponential kernel identity") {
  for (const char* spec : {"gaussian:0,1", "c2_bump:0,1", "tent:-1,1", "mollified_indicator:0,1,0.05"}) {
    auto f = parse_function(spec);
    for (double delta : {0.5, 1.0, 2.0}) {
      auto k = exponential_kernel_identity(f, delta);
      INFO(spec << " delta=" << delta);
      CHECK(std::abs(k.lhs - k.rhs) < 1e-5);
    }
  }
}
