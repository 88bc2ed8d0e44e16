#include "mesozeta/zeros.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <sstream>
#include <vector>

#include <boost/math/special_functions/lambert_w.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "mesozeta/data_dir.hpp"
#include "mesozeta/errors.hpp"
#include "mesozeta/parallel.hpp"
#include "mesozeta/zeta.hpp"

namespace mesozeta {
namespace {

constexpr long double kPiL = 3.14159265358979323846264338327950288L;
constexpr long double kE = 2.71828182845904523536028747135266250L;
constexpr int kSubdivision = 64;
constexpr int kEscalations = 2;

struct Bracket {
  double lo, hi, zlo, zhi;
};

bool positive(double z) { return z >= 0.0; }

// Gram points and Z at Gram points over a growing contiguous index range.
class GramCache {
 public:
  explicit GramCache(unsigned threads) : threads_(threads) {}

  void ensure(long lo, long hi) {
    lo = std::max(lo, -1L);
    if (g_.empty()) {
      base_ = lo;
      append(lo, hi);
      return;
    }
    if (lo < base_) prepend(lo);
    if (hi > last()) append(last() + 1, hi);
  }

  double g(long n) {
    ensure(n, n);
    return g_[static_cast<std::size_t>(n - base_)];
  }
  double z(long n) {
    ensure(n, n);
    return z_[static_cast<std::size_t>(n - base_)];
  }
  // (-1)^n Z(g_n) > 0; g_{-1} counts as good since N(g_{-1}) = 0 is known.
  bool good(long n) {
    if (n == -1) return true;
    const double zn = z(n);
    return (n & 1) ? zn < 0.0 : zn > 0.0;
  }
  long next_good(long n) {
    long m = n + 1;
    while (!good(m)) {
      ensure(m, m + 64);
      ++m;
    }
    return m;
  }
  long prev_good(long n) {
    long m = n - 1;
    while (!good(m)) {
      ensure(m - 64, m);
      --m;
    }
    return m;
  }

 private:
  long last() const { return base_ + static_cast<long>(g_.size()) - 1; }

  void compute(long lo, long hi, std::vector<double>& gs, std::vector<double>& zs) {
    const auto n = static_cast<std::size_t>(hi - lo + 1);
    gs.resize(n);
    zs.resize(n);
    parallel_for(n, threads_, [&](std::size_t i) {
      gs[i] = gram_point(lo + static_cast<long>(i));
      zs[i] = detail::z_unchecked(gs[i]);
    });
  }
  void append(long lo, long hi) {
    std::vector<double> gs, zs;
    compute(lo, hi, gs, zs);
    g_.insert(g_.end(), gs.begin(), gs.end());
    z_.insert(z_.end(), zs.begin(), zs.end());
  }
  void prepend(long lo) {
    std::vector<double> gs, zs;
    compute(lo, base_ - 1, gs, zs);
    g_.insert(g_.begin(), gs.begin(), gs.end());
    z_.insert(z_.begin(), zs.begin(), zs.end());
    base_ = lo;
  }

  unsigned threads_;
  long base_ = 0;
  std::deque<double> g_, z_;
};

std::vector<Bracket> sign_changes(const std::vector<double>& ts, const std::vector<double>& zs) {
  std::vector<Bracket> out;
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    if (positive(zs[i]) != positive(zs[i + 1])) out.push_back({ts[i], ts[i + 1], zs[i], zs[i + 1]});
  }
  return out;
}

struct CertifiedWindow {
  long a = -1;  // N(g_a) = a + 1
  long b = -1;  // N(g_b) = b + 1
  std::vector<Bracket> brackets;  // sign changes of Z in (g_a, g_b]
};

// Sign changes in the Gram block [g_j, g_k]; `extra` are additional sample
// points. Subdivides when the block falls short of k - j sign changes.
std::vector<Bracket> scan_block(GramCache& cache, long j, long k, const std::vector<double>& extra,
                                const ZeroSearchOptions& opts) {
  const long need = k - j;
  std::vector<Bracket> found;
  int per_interval = std::max(1, opts.samples_per_gram_interval);
  for (int level = 0; level <= kEscalations; ++level) {
    std::vector<double> ts;
    for (long n = j; n < k; ++n) {
      const double g0 = cache.g(n), g1 = cache.g(n + 1);
      ts.push_back(g0);
      for (int i = 1; i < per_interval; ++i) ts.push_back(g0 + (g1 - g0) * i / per_interval);
    }
    ts.push_back(cache.g(k));
    const double first = ts.front(), last = ts.back();
    for (double e : extra) {
      if (e > first && e < last) ts.push_back(e);
    }
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    std::vector<double> zs(ts.size());
    parallel_for(ts.size(), ts.size() > 64 ? opts.threads : 1, [&](std::size_t i) {
      zs[i] = detail::z_unchecked(ts[i]);
    });
    // Gram-point values come from the cache so that block goodness and
    // sampled signs agree exactly.
    zs.front() = cache.z(j);
    zs.back() = cache.z(k);
    found = sign_changes(ts, zs);
    if (static_cast<long>(found.size()) >= need) return found;
    per_interval *= kSubdivision;
  }
  std::ostringstream os;
  os.precision(12);
  os << "Gram block [g_" << j << ", g_" << k << "] = [" << cache.g(j) << ", " << cache.g(k) << "] shows "
     << found.size() << " sign changes of Z, Rosser's rule needs " << need;
  throw CertificationError(os.str());
}

CertifiedWindow certified_window(double t_lo, double t_hi, const std::vector<double>& extra,
                                 const ZeroSearchOptions& opts) {
  GramCache cache(opts.threads);
  const long n_lo = std::max(-1L, static_cast<long>(std::floor(detail::theta_ld(t_lo) / kPiL)));
  const long n_hi = std::max(0L, static_cast<long>(std::floor(detail::theta_ld(t_hi) / kPiL)) + 1);
  cache.ensure(n_lo - 32, n_hi + 32);

  CertifiedWindow w;
  long a = n_lo;
  while (!cache.good(a)) --a;
  long b = n_hi;
  while (!cache.good(b)) ++b;

  long end = b;
  for (int blocks = 0;;) {
    end = cache.next_good(end);
    if (++blocks >= brent_block_count(cache.g(end))) break;
  }
  long start = a;
  if (a >= 0) {
    const int needed = brent_block_count(cache.g(a));
    for (int blocks = 0; blocks < needed && start > -1;) {
      start = cache.prev_good(start);
      ++blocks;
    }
    // Reaching g_{-1} means the count below a is anchored directly.
    if (start == -1) a = -1;
  }

  for (long j = start; j < end;) {
    const long k = cache.next_good(j);
    auto found = scan_block(cache, j, k, extra, opts);
    if (j >= a && k <= b) w.brackets.insert(w.brackets.end(), found.begin(), found.end());
    j = k;
  }
  w.a = a;
  w.b = b;
  if (static_cast<long>(w.brackets.size()) != b - a) {
    std::ostringstream os;
    os.precision(12);
    os << "zero count between g_" << a << " and g_" << b << " (" << cache.g(std::max(a, -1L)) << ", "
       << cache.g(b) << "]: found " << w.brackets.size() << " sign changes, certified count " << b - a;
    throw CertificationError(os.str());
  }
  return w;
}

}  // namespace

int brent_block_count(double g) {
  const double l = std::log(g);
  return std::max(1, static_cast<int>(std::ceil(0.0061 * l * l + 0.08 * l)));
}

double gram_point(long n) {
  if (n < -1) throw DomainError("gram_point: index must be >= -1");
  const long double target = static_cast<long double>(n) * kPiL;
  const double x = (static_cast<double>(n) + 0.125) / static_cast<double>(kE);
  long double t = 2.0L * kPiL * kE * std::exp(static_cast<long double>(boost::math::lambert_w0(x)));
  for (int it = 0; it < 8; ++it) {
    const long double f = detail::theta_ld(t) - target;
    const long double df = 0.5L * std::log(t / (2.0L * kPiL));
    const long double step = f / df;
    t -= step;
    if (std::fabs(step) < 1e-15L * t) break;
  }
  return static_cast<double>(t);
}

ZeroTable find_zeros(double t1, double t2, double precision, const ZeroSearchOptions& opts) {
  if (!(t1 >= 10.0) || !(t2 > t1) || !(t2 <= 1e7)) {
    std::ostringstream os;
    os << "find_zeros: need 10 <= t1 < t2 <= 1e7, got [" << t1 << ", " << t2 << "]";
    throw DomainError(os.str());
  }
  if (!(precision >= 1e-9)) throw DomainError("find_zeros: precision must be >= 1e-9");

  const CertifiedWindow w = certified_window(t1, t2, {t1, t2}, opts);
  std::vector<Bracket> inside;
  std::int64_t below = w.a + 1;
  for (const auto& br : w.brackets) {
    if (br.hi <= t1) ++below;
    if (br.lo >= t1 && br.hi <= t2) inside.push_back(br);
  }
  std::vector<double> ords(inside.size());
  parallel_for(inside.size(), opts.threads, [&](std::size_t i) {
    const Bracket& br = inside[i];
    auto f = [](double t) { return detail::z_unchecked(t); };
    auto tol = [precision](double lo, double hi) { return hi - lo <= precision; };
    std::uintmax_t iters = 200;
    auto r = boost::math::tools::toms748_solve(f, br.lo, br.hi, br.zlo, br.zhi, tol, iters);
    ords[i] = 0.5 * (r.first + r.second);
  });
  const double floor = below == 0 ? 0.0 : t1;
  return ZeroTable(std::move(ords), t2, precision, "computed", floor);
}

std::int64_t count_zeros(double T, const ZeroSearchOptions& opts) {
  if (!(T >= 10.0)) throw DomainError("count_zeros: T must be >= 10");
  const CertifiedWindow w = certified_window(T, T, {T}, opts);
  std::int64_t n = w.a + 1;
  for (const auto& br : w.brackets) {
    if (br.hi <= T) ++n;
  }
  return n;
}

ZeroTableCheck verify_zero_table(const ZeroTable& table, const ZeroSearchOptions& opts) {
  ZeroTableCheck c;
  c.listed = static_cast<std::int64_t>(table.size());
  c.certified = count_zeros(table.height(), opts);
  if (table.floor() > 0.0) c.certified -= count_zeros(std::max(table.floor(), 10.0), opts);
  return c;
}

ZeroTable ensure_zero_table(double height, const ZeroSearchOptions& opts) {
  const auto dir = data_dir();
  if (dir && std::filesystem::is_directory(*dir)) {
    std::optional<ZeroTable> best;
    for (const auto& entry : std::filesystem::directory_iterator(*dir)) {
      const auto name = entry.path().filename().string();
      if (name.rfind("zeros_to_", 0) != 0 || entry.path().extension() != ".txt") continue;
      try {
        ZeroTable t = load_zero_table(entry.path());
        if (t.floor() == 0.0 && t.height() >= height && (!best || t.height() < best->height())) best = std::move(t);
      } catch (const ParseError&) {
        continue;
      }
    }
    if (best) return *best;
  }
  ZeroTable t = find_zeros(10.0, height, 1e-9 * 2, opts);
  if (dir) {
    std::error_code ec;
    std::filesystem::create_directories(*dir, ec);
    char name[64];
    std::snprintf(name, sizeof name, "zeros_to_%.0f.txt", std::ceil(height));
    const auto tmp = *dir / (std::string(name) + ".tmp");
    save_zero_table(t, tmp);
    std::filesystem::rename(tmp, *dir / name, ec);
    if (ec) throw IoError("cannot place zero table cache: " + ec.message());
  }
  return t;
}

}  // namespace mesozeta
