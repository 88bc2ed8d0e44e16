#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <utility>

namespace mesozeta {

// Philox4x32-10 (Salmon et al., Random123). Counter-based: the output for a
// (key, counter) pair never depends on how many other draws were made, so
// sample i gets the same omega under any thread count.
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Block generate(Block ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += 0x9E3779B9u;
        key[1] += 0xBB67AE85u;
      }
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }
};

// Draws addressed by (seed, stream, index).
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint32_t stream = 0)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}, stream_(stream) {}

  Philox4x32::Block block(std::uint64_t index) const {
    return Philox4x32::generate(
        {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), stream_, 0u}, key_);
  }

  // Two uniforms strictly inside (0, 1) with 53 random bits each.
  std::pair<double, double> uniform_pair(std::uint64_t index) const {
    const auto b = block(index);
    return {to_unit(b[0], b[1]), to_unit(b[2], b[3])};
  }
  double uniform(std::uint64_t index) const { return uniform_pair(index).first; }

  // Box-Muller; returns two independent standard normals.
  std::pair<double, double> normal_pair(std::uint64_t index) const {
    const auto [u1, u2] = uniform_pair(index);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925 * u2;
    return {r * std::cos(a), r * std::sin(a)};
  }

 private:
  static double to_unit(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = ((std::uint64_t{hi} << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  Philox4x32::Key key_;
  std::uint32_t stream_;
};

}  // namespace mesozeta
