#include <cmath>
#include <random>

#include <doctest.h>
#include "mesozeta/errors.hpp"
#include "mesozeta/linstat.hpp"
#include "mesozeta/zeros.hpp"

using namespace mesozeta;

namespace {
constexpr double kPi = 3.14159265358979323846;

const ZeroTable& zeros_to_2e4() {
  static const ZeroTable z = ensure_zero_table(20100);
  return z;
}

const PrimeTable& primes_to_1e6() {
  static const PrimeTable p = PrimeTable::sieve(1000000);
  return p;
}

TestFunction zero_fn() { return scaled(builtin("gaussian", {0, 1}), 0.0); }
}  // namespace

TEST_CASE("scale point validation") {
  auto s = ScalePoint::make(1.5, 1e4, 3);
  CHECK(s.u == doctest::Approx(100));
  CHECK(ScalePoint::make(1.5, 1e4, 3, 1.0).u == doctest::Approx(1e4));
  CHECK_THROWS_AS(ScalePoint::make(1.0, 1e4, 3), ParameterError);
  CHECK_THROWS_AS(ScalePoint::make(2.0, 1e4, 3), ParameterError);
  CHECK_THROWS_AS(ScalePoint::make(1.5, 99, 3), ParameterError);
  CHECK_THROWS_AS(ScalePoint::make(1.5, 1e4, std::log(1e4)), ParameterError);
  CHECK_THROWS_AS(ScalePoint::make(1.5, 1e4, 0), ParameterError);
  CHECK_THROWS_AS(ScalePoint::make(1.5, 1e4, 3, 0), ParameterError);
  CHECK_THROWS_AS(ScalePoint::make(1.5, 1e4, 3, 1.5), ParameterError);
}

TEST_CASE("zero side") {
  const auto& zeros = zeros_to_2e4();
  auto s = ScalePoint::make(1.5, 1e4, 3);
  auto g = builtin("gaussian", {0, 1});
  auto t = builtin("tent", {-1, 1});

  CHECK(zero_side_stat(zero_fn(), zeros, s).value == 0.0);

  const double a = zero_side_stat(g, zeros, s).value;
  const double b = zero_side_stat(t, zeros, s).value;
  const double c = zero_side_stat(linear_combination(2.0, g, -0.7, t), zeros, s).value;
  CHECK(std::fabs(c - (2.0 * a - 0.7 * b)) < 1e-9);

  // brute force over the whole table, no window
  const auto z = zero_side_stat(g, zeros, s);
  CHECK(z.window_count > 0);
  CHECK(std::fabs(z.value - zero_side_bruteforce(g, zeros, s)) <= z.truncation_bound + 1e-12);
  CHECK(z.centering == doctest::Approx(std::log(1e4) / (6 * kPi) * std::sqrt(2 * kPi)).epsilon(1e-12));

  // compactly supported f: the window is exact
  const auto zt = zero_side_stat(t, zeros, s);
  CHECK(std::fabs(zt.value - zero_side_bruteforce(t, zeros, s)) < 1e-12);

  // additivity over a split of the table
  auto lo = zeros.slice(0, 15000.2);
  auto hi = zeros.slice(15000.2, zeros.height());
  const double split = zero_side_bruteforce(g, lo, s) + zero_side_bruteforce(g, hi, s) - z.value;
  CHECK(std::fabs(split + z.centering) < 1e-10);
}

TEST_CASE("zero side coverage") {
  const auto& zeros = zeros_to_2e4();
  auto g = builtin("gaussian", {0, 1});
  auto short_table = zeros.slice(0, 15000);
  CHECK_THROWS_AS(zero_side_stat(g, short_table, ScalePoint::make(1.6, 1e4, 3)), CoverageError);
  CHECK_NOTHROW(zero_side_stat(g, short_table, ScalePoint::make(1.4, 1e4, 3)));
  CHECK(required_zero_height(g, 1e4, 3) > 2e4);
  CHECK(required_zero_height(g, 1e4, 3) < 2e4 + 4);
  auto upper = zeros.slice(12000, zeros.height());
  CHECK_THROWS_AS(zero_side_stat(g, upper, ScalePoint::make(1.2, 1e4, 3)), CoverageError);
  CHECK_NOTHROW(zero_side_stat(g, upper, ScalePoint::make(1.5, 1e4, 3)));
}

TEST_CASE("prime side basics") {
  const auto& primes = primes_to_1e6();
  auto s = ScalePoint::make(1.5, 1e4, 3);
  CHECK(prime_side_stat(zero_fn(), s, primes) == 0.0);

  auto g = builtin("gaussian", {0, 1});
  PrimeSideKernel k(g, s, primes);
  // primes, then powers p^k <= 1e4 for k = 2..13
  CHECK(k.terms() == 1229 + 25 + 8 + 4 + 3 + 2 + 2 + 2 + 1 + 1 + 1 + 1 + 1);
  for (double w : {1.1, 1.5, 1.93}) {
    auto v = k.evaluate(w);
    CHECK(v.imag_defect <= 1e-10);
    CHECK(std::fabs(v.full - (v.primes + v.powers)) <= 1e-10);
  }
  // asymmetric f keeps the imaginary parts cancelling
  auto shifted_tent = builtin("tent", {0.2, 1.9});
  auto v = PrimeSideKernel(shifted_tent, s, primes).evaluate(1.37);
  CHECK(v.imag_defect <= 1e-10);

  auto small = PrimeTable::sieve(5000);
  CHECK_THROWS_AS(PrimeSideKernel(g, s, small), ResourceError);
}

TEST_CASE("prime side against an independent loop at t = 1e6") {
  const auto& primes = primes_to_1e6();
  auto g = builtin("gaussian", {0, 1});
  auto s = ScalePoint::make(1.7, 1e6, 4);
  const double v = prime_side_stat(g, s, primes);

  // descending order, trial-division weights, long double accumulation,
  // fhat real and even so the pair collapses to a cosine
  const double u = 1000.0, lam = 4.0, wt = 1.7e6;
  long double acc = 0.0L;
  for (std::uint64_t n = 1000000; n >= 2; --n) {
    const double w = lambda_u(n, u);
    if (w == 0.0) continue;
    const long double ln = std::log(static_cast<long double>(n));
    const double xi = static_cast<double>(ln) / lam;
    const double fh = std::sqrt(2.0 / kPi) * std::exp(-0.5 * xi * xi);
    acc -= static_cast<long double>(w / std::sqrt(static_cast<double>(n)) * fh) * std::cos(wt * ln) / lam;
  }
  CHECK(v == doctest::Approx(static_cast<double>(acc)).epsilon(1e-9));
  CHECK(prime_side_stat(g, s, primes, PrimeMode::primes_only) + prime_side_stat(g, s, primes, PrimeMode::powers_only) ==
        doctest::Approx(v).epsilon(1e-12));
}

TEST_CASE("explicit residual") {
  const auto& zeros = zeros_to_2e4();
  const auto& primes = primes_to_1e6();
  auto s = ScalePoint::make(1.5, 1e4, 3);

  auto z = explicit_residual(zero_fn(), zeros, s, primes);
  CHECK(z.zero_side == 0.0);
  CHECK(z.prime_full == 0.0);
  CHECK(z.residual == 0.0);
  CHECK(z.envelope == 0.0);

  // The two sides track each other; the mean residual is the centering
  // offset (integral f)/(2 pi lambda) * E log(omega/(2 pi)) for omega
  // uniform on (1, 2).
  auto g = builtin("gaussian", {0, 1});
  PrimeSideKernel k(g, s, primes);
  const auto nb = norms(g);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(1.0, 2.0);
  double sz = 0, sp = 0, szz = 0, spp = 0, szp = 0, sr = 0;
  const int n = 100;
  for (int i = 0; i < n; ++i) {
    auto r = explicit_residual(g, zeros, k, s.with_omega(unif(rng)), nb);
    CHECK(r.residual == doctest::Approx(r.zero_side - r.prime_full).epsilon(1e-15));
    sz += r.zero_side, sp += r.prime_full, sr += r.residual;
    szz += r.zero_side * r.zero_side, spp += r.prime_full * r.prime_full, szp += r.zero_side * r.prime_full;
  }
  const double cov = szp / n - (sz / n) * (sp / n);
  const double corr = cov / std::sqrt((szz / n - sz * sz / (n * n)) * (spp / n - sp * sp / (n * n)));
  CHECK(corr > 0.95);
  const double offset = g.integral() / (2 * kPi * 3.0) * (2 * std::log(2.0) - 1 - std::log(2 * kPi));
  CHECK(sr / n == doctest::Approx(offset).epsilon(0.1));
}

TEST_CASE("residual stays inside the envelope at random scale points") {
  const auto& zeros = zeros_to_2e4();
  const auto& primes = primes_to_1e6();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(1.0, 2.0), lam(2.0, 5.0);
  for (const char* spec : {"gaussian:0,1", "c2_bump:0,1", "tent:-1,1", "mollified_indicator:0,1,0.05"}) {
    auto f = parse_function(spec);
    REQUIRE(check_hypotheses(f).covariance_admissible());
    const auto nb = norms(f);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      auto s = ScalePoint::make(unif(rng), 1e4, lam(rng));
      auto r = explicit_residual(f, zeros, s, primes);
      worst = std::max(worst, std::fabs(r.residual) / r.envelope);
    }
    INFO(spec << " worst |residual|/envelope = " << worst);
    CHECK(worst <= 20.0);
  }
}

TEST_CASE("diagonal report") {
  const auto& primes = primes_to_1e6();
  auto g = builtin("gaussian", {0, 1});
  auto d = diagonal_report(g, 1e6, 4, 1e3, primes);
  // independent sum over primes in double precision
  CHECK(d.sum_bpt_sq == doctest::Approx(0.266286711149078).epsilon(1e-9));
  CHECK(d.main_integral == doctest::Approx((1 - std::exp(-std::pow(std::log(1e6) / 8, 2))) / kPi).epsilon(1e-10));
  CHECK(d.remainder_integral > 0);
  // Mertens-type lower-order term keeps the ratio below 1 at this height
  CHECK(d.ratio == doctest::Approx(0.8812).epsilon(1e-3));
  CHECK(diagonal_report(g, 1e4, 4, 1e2, primes).ratio == doctest::Approx(1.0).epsilon(1e-3));

  auto tiny = diagonal_report(g, 1e6, 70, 1e3, primes);
  CHECK(std::log(1e6) / 140 < 0.1);
  CHECK(std::isfinite(tiny.ratio));
  CHECK(tiny.main_integral > 0);

  auto ind = diagonal_report(builtin("indicator", {0, 1}), 1e6, 2, 1e3, primes);
  CHECK(ind.ratio >= 0.8);
  CHECK(ind.ratio <= 1.2);
}

TEST_CASE("prime power share") {
  const auto& primes = primes_to_1e6();
  auto g = builtin("gaussian", {0, 1});
  auto share = [&](double t) { return prime_power_share(PrimeSideKernel(g, ScalePoint::make(1.5, t, 4), primes)); };
  const auto s6 = share(1e6), s4 = share(1e4);
  CHECK_FALSE(s6.degenerate);
  CHECK(s6.share <= 0.05);
  CHECK(s4.share > s6.share);
  auto z = prime_power_share(PrimeSideKernel(zero_fn(), ScalePoint::make(1.5, 1e4, 4), primes));
  CHECK(z.degenerate);
  CHECK(z.share == 0.0);

  // empirical second moments sit near the diagonal proxy
  PrimeSideKernel k(g, ScalePoint::make(1.5, 1e4, 4), primes);
  std::vector<double> omegas;
  for (int i = 0; i < 400; ++i) omegas.push_back(1.0 + (i + 0.5) / 400.0);
  const auto emp = prime_power_share(k, omegas);
  CHECK(emp.share > 0.5 * s4.share);
  CHECK(emp.share < 3.0 * s4.share);
}

TEST_CASE("tail condition") {
  const auto& primes = primes_to_1e6();
  auto g = builtin("gaussian", {0, 1});
  CHECK(tail_condition(g, 1e6, 4, 1e3, 1e6, primes) == 0.0);
  double prev = 1e300;
  for (double m : {1.0, 10.0, 100.0, 1000.0, 1e4, 1e5}) {
    const double v = tail_condition(g, 1e6, 4, 1e3, m, primes);
    CHECK(v >= 0.0);
    CHECK(v <= prev);
    prev = v;
  }
  // m_t = exp(log t/sigma_t) lies beyond u^2 for the gaussian, so the sum is empty
  prev = 1e300;
  for (double t : {1e4, 1e5, 1e6}) {
    const double m = tail_cutoff(g, t, 4);
    const double v = tail_condition(g, t, 4, std::sqrt(t), m, primes);
    CHECK(v <= 0.2);
    CHECK(v <= prev);
    prev = v;
  }
}

TEST_CASE("Montgomery-Vaughan") {
  auto single = mv_check({{0.3, -1.2}}, {2.5}, 7.0);
  CHECK(single.lhs == doctest::Approx(std::norm(std::complex<double>(0.3, -1.2))).epsilon(1e-12));
  CHECK(single.holds);

  // |1 + exp(2 pi i s)|^2 averages to exactly 2 over [10, 20]
  auto two = mv_check({1.0, 1.0}, {0.0, 2 * kPi}, 10.0);
  CHECK(two.lhs == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(two.rhs == doctest::Approx(2.0 * (1 + 3 * kPi / (10 * 2 * kPi))).epsilon(1e-12));
  CHECK(two.holds);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  const auto& plist = primes_to_1e6().primes();
  std::vector<std::complex<double>> a;
  std::vector<double> fr;
  for (int i = 0; i < 20; ++i) {
    a.emplace_back(nd(rng), nd(rng));
    fr.push_back(std::log(static_cast<double>(plist[i])));
  }
  CHECK(mv_check(a, fr, 1e3).holds);

  CHECK_THROWS_AS(mv_check({1.0, 1.0}, {0.5, 0.5}, 10.0), DomainError);

  // closed form of the mean square for a random instance
  std::vector<std::complex<double>> b{{1, 0.5}, {-0.3, 2}, {0.7, -0.1}};
  std::vector<double> lb{0.1, 1.3, 2.9};
  const double t = 25;
  std::complex<double> exact = 0.0;
  for (int r = 0; r < 3; ++r) {
    for (int q = 0; q < 3; ++q) {
      const double d = lb[r] - lb[q];
      const std::complex<double> m = d == 0 ? t : (std::polar(1.0, d * 2 * t) - std::polar(1.0, d * t)) /
                                                      std::complex<double>(0, d);
      exact += b[r] * std::conj(b[q]) * m;
    }
  }
  CHECK(mv_check(b, lb, t).lhs == doctest::Approx(exact.real() / t).epsilon(1e-11));
}

TEST_CASE("Montgomery-Vaughan holds on random instances") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> count(1, 8);
  std::uniform_real_distribution<double> freq(0.0, 10.0), height(1.0, 100.0);
  std::normal_distribution<double> nd;
  int held = 0;
  for (int i = 0; i < 1000; ++i) {
    const int n = count(rng);
    std::vector<std::complex<double>> a;
    std::vector<double> fr;
    for (int r = 0; r < n; ++r) {
      a.emplace_back(nd(rng), nd(rng));
      fr.push_back(freq(rng));
    }
    held += mv_check(a, fr, height(rng)).holds;
  }
  CHECK(held == 1000);
}
