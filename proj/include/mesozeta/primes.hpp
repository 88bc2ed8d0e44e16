#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace mesozeta {

struct PrimePower {
  std::uint64_t p;
  unsigned k;
};

// Denominator of the tapered branch of the smoothed weight on (u, u^2].
// log_u is Selberg's weight, for which the four-term decomposition of
// zeta'/zeta is exact; log_n is the alternative printed form, kept for
// comparison.
enum class Taper { log_u, log_n };

// Primes up to a limit, immutable after construction.
class PrimeTable {
 public:
  // Segmented sieve of Eratosthenes. Throws DomainError for limit < 2.
  static PrimeTable sieve(std::uint64_t limit);

  // Loads a sieve from the binary cache under `dir`, or sieves and writes
  // the cache when absent or built for a smaller limit.
  static PrimeTable cached(std::uint64_t limit, const std::filesystem::path& dir);
  // As above, using the data directory from the environment when set.
  static PrimeTable acquire(std::uint64_t limit);

  void save(const std::filesystem::path& path) const;
  static PrimeTable load(const std::filesystem::path& path);

  std::uint64_t limit() const noexcept { return limit_; }
  const std::vector<std::uint32_t>& primes() const noexcept { return primes_; }
  std::size_t count_up_to(std::uint64_t x) const;

  bool is_prime(std::uint64_t n) const;
  std::optional<PrimePower> prime_power(std::uint64_t n) const;
  double von_mangoldt(std::uint64_t n) const;
  double lambda_u(std::uint64_t n, double u, Taper taper = Taper::log_u) const;

  // Calls f(n, p, k) for every prime power n = p^k <= max_n, grouped by p.
  template <class F>
  void for_each_prime_power(std::uint64_t max_n, F&& f) const {
    check_range(max_n);
    for (std::uint32_t p32 : primes_) {
      std::uint64_t p = p32;
      if (p > max_n) break;
      std::uint64_t pk = p;
      unsigned k = 1;
      while (true) {
        f(pk, p, k);
        if (pk > max_n / p) break;
        pk *= p;
        ++k;
      }
    }
  }

 private:
  PrimeTable(std::uint64_t limit, std::vector<std::uint32_t> primes)
      : limit_(limit), primes_(std::move(primes)) {}
  void check_range(std::uint64_t n) const;

  std::uint64_t limit_ = 0;
  std::vector<std::uint32_t> primes_;
};

// Table-free versions by trial division; fine for isolated values.
double von_mangoldt(std::uint64_t n);
double lambda_u(std::uint64_t n, double u, Taper taper = Taper::log_u);

// Weight from a known Lambda(n); the shared branch logic.
double smoothed_weight(double lambda_n, std::uint64_t n, double u, Taper taper = Taper::log_u);

}  // namespace mesozeta
