#include "mesozeta/primes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "mesozeta/data_dir.hpp"
#include "mesozeta/errors.hpp"

namespace mesozeta {
namespace {

constexpr std::array<char, 8> kMagic{'M', 'Z', 'P', 'R', 'I', 'M', 'E', '1'};
constexpr std::uint64_t kMaxLimit = 4294967295ULL;
constexpr std::uint64_t kSegmentOdds = 1ULL << 18;

std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

// Integer k-th root, floor.
std::uint64_t iroot(std::uint64_t n, unsigned k) {
  if (k == 1) return n;
  auto r = static_cast<std::uint64_t>(std::pow(static_cast<double>(n), 1.0 / k));
  auto pow_le = [&](std::uint64_t b) {
    std::uint64_t acc = 1;
    for (unsigned i = 0; i < k; ++i) {
      if (acc > n / b) return false;
      acc *= b;
    }
    return acc <= n;
  };
  while (r > 1 && !pow_le(r)) --r;
  while (pow_le(r + 1)) ++r;
  return r;
}

std::uint64_t ipow(std::uint64_t b, unsigned k) {
  std::uint64_t acc = 1;
  for (unsigned i = 0; i < k; ++i) acc *= b;
  return acc;
}

std::optional<PrimePower> trial_prime_power(std::uint64_t n) {
  if (n < 2) return std::nullopt;
  std::uint64_t p = 0;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      p = d;
      break;
    }
  }
  if (p == 0) return PrimePower{n, 1};
  unsigned k = 0;
  while (n % p == 0) {
    n /= p;
    ++k;
  }
  if (n != 1) return std::nullopt;
  return PrimePower{p, k};
}

}  // namespace

double smoothed_weight(double lambda_n, std::uint64_t n, double u, Taper taper) {
  if (!(u > 1.0)) throw DomainError("lambda_u: u must exceed 1, got " + std::to_string(u));
  if (n < 1) throw DomainError("lambda_u: n must be >= 1");
  if (lambda_n == 0.0) return 0.0;
  const double x = static_cast<double>(n);
  if (x <= u) return lambda_n;
  if (x <= u * u) {
    const double denom = taper == Taper::log_u ? std::log(u) : std::log(x);
    return lambda_n * std::log(u * u / x) / denom;
  }
  return 0.0;
}

double von_mangoldt(std::uint64_t n) {
  if (n < 1) throw DomainError("von_mangoldt: n must be >= 1");
  auto pp = trial_prime_power(n);
  return pp ? std::log(static_cast<double>(pp->p)) : 0.0;
}

double lambda_u(std::uint64_t n, double u, Taper taper) {
  if (n < 1) throw DomainError("lambda_u: n must be >= 1");
  return smoothed_weight(von_mangoldt(n), n, u, taper);
}

PrimeTable PrimeTable::sieve(std::uint64_t limit) {
  if (limit < 2) throw DomainError("sieve: limit must be >= 2, got " + std::to_string(limit));
  if (limit > kMaxLimit) throw DomainError("sieve: limit above 2^32-1 is not supported");

  const std::uint64_t root = isqrt(limit);
  std::vector<std::uint32_t> base;
  {
    std::vector<char> comp(root + 1, 0);
    for (std::uint64_t i = 3; i <= root; i += 2) {
      if (comp[i]) continue;
      base.push_back(static_cast<std::uint32_t>(i));
      for (std::uint64_t j = i * i; j <= root; j += 2 * i) comp[j] = 1;
    }
  }

  std::vector<std::uint32_t> primes{2};
  primes.reserve(static_cast<std::size_t>(1.3 * static_cast<double>(limit) / std::log(static_cast<double>(limit))) + 16);
  std::vector<char> mark;
  for (std::uint64_t lo = 3; lo <= limit; lo += 2 * kSegmentOdds) {
    const std::uint64_t hi = std::min(limit, lo + 2 * kSegmentOdds - 1);
    mark.assign((hi - lo) / 2 + 1, 1);
    for (std::uint32_t p32 : base) {
      const std::uint64_t p = p32;
      if (p * p > hi) break;
      std::uint64_t start = std::max(p * p, (lo + p - 1) / p * p);
      if (start % 2 == 0) start += p;
      for (std::uint64_t j = start; j <= hi; j += 2 * p) mark[(j - lo) / 2] = 0;
    }
    for (std::size_t i = 0; i < mark.size(); ++i) {
      if (mark[i]) primes.push_back(static_cast<std::uint32_t>(lo + 2 * i));
    }
  }
  return PrimeTable(limit, std::move(primes));
}

void PrimeTable::save(const std::filesystem::path& path) const {
  const std::uint64_t nbits = (limit_ + 1) / 2;  // bit i <-> odd 2i+1
  std::vector<unsigned char> bits((nbits + 7) / 8, 0);
  for (std::uint32_t p : primes_) {
    if (p == 2) continue;
    const std::uint64_t i = p / 2;
    bits[i / 8] |= static_cast<unsigned char>(1u << (i % 8));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write sieve cache " + path.string());
  out.write(kMagic.data(), kMagic.size());
  out.write(reinterpret_cast<const char*>(&limit_), sizeof limit_);
  out.write(reinterpret_cast<const char*>(bits.data()), static_cast<std::streamsize>(bits.size()));
  if (!out) throw IoError("short write to sieve cache " + path.string());
}

PrimeTable PrimeTable::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open sieve cache " + path.string());
  std::array<char, 8> magic{};
  std::uint64_t limit = 0;
  in.read(magic.data(), magic.size());
  in.read(reinterpret_cast<char*>(&limit), sizeof limit);
  if (!in || magic != kMagic || limit < 2 || limit > kMaxLimit) {
    throw ParseError("bad sieve cache header in " + path.string());
  }
  const std::uint64_t nbits = (limit + 1) / 2;
  std::vector<unsigned char> bits((nbits + 7) / 8);
  in.read(reinterpret_cast<char*>(bits.data()), static_cast<std::streamsize>(bits.size()));
  if (!in) throw ParseError("truncated sieve cache " + path.string());
  std::vector<std::uint32_t> primes{2};
  for (std::uint64_t i = 1; i < nbits; ++i) {
    if (bits[i / 8] & (1u << (i % 8))) primes.push_back(static_cast<std::uint32_t>(2 * i + 1));
  }
  return PrimeTable(limit, std::move(primes));
}

PrimeTable PrimeTable::cached(std::uint64_t limit, const std::filesystem::path& dir) {
  const auto path = dir / "sieve.bin";
  if (std::filesystem::exists(path)) {
    try {
      PrimeTable t = load(path);
      if (t.limit() >= limit) return t;
    } catch (const ParseError&) {
      // regenerate below
    }
  }
  PrimeTable t = sieve(limit);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const auto tmp = dir / ("sieve.bin.tmp" + std::to_string(limit));
  t.save(tmp);
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot place sieve cache at " + path.string() + ": " + ec.message());
  return t;
}

PrimeTable PrimeTable::acquire(std::uint64_t limit) {
  if (auto dir = data_dir()) return cached(limit, *dir);
  return sieve(limit);
}

void PrimeTable::check_range(std::uint64_t n) const {
  if (n > limit_) {
    throw ResourceError("prime table sieved to " + std::to_string(limit_) + " but " +
                        std::to_string(n) + " is required");
  }
}

std::size_t PrimeTable::count_up_to(std::uint64_t x) const {
  check_range(x);
  return static_cast<std::size_t>(std::upper_bound(primes_.begin(), primes_.end(), x) - primes_.begin());
}

bool PrimeTable::is_prime(std::uint64_t n) const {
  check_range(n);
  return std::binary_search(primes_.begin(), primes_.end(), static_cast<std::uint32_t>(n));
}

std::optional<PrimePower> PrimeTable::prime_power(std::uint64_t n) const {
  check_range(n);
  if (n < 2) return std::nullopt;
  for (unsigned k = 1; (1ULL << k) <= n; ++k) {
    const std::uint64_t r = iroot(n, k);
    if (r >= 2 && ipow(r, k) == n && is_prime(r)) return PrimePower{r, k};
  }
  return std::nullopt;
}

double PrimeTable::von_mangoldt(std::uint64_t n) const {
  if (n < 1) throw DomainError("von_mangoldt: n must be >= 1");
  auto pp = prime_power(n);
  return pp ? std::log(static_cast<double>(pp->p)) : 0.0;
}

double PrimeTable::lambda_u(std::uint64_t n, double u, Taper taper) const {
  if (n < 1) throw DomainError("lambda_u: n must be >= 1");
  if (!(u > 1.0)) throw DomainError("lambda_u: u must exceed 1, got " + std::to_string(u));
  if (static_cast<double>(n) > u * u) return 0.0;
  return smoothed_weight(von_mangoldt(n), n, u, taper);
}

}  // namespace mesozeta
