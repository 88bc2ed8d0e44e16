#pragma once

#include <cstdint>
#include <filesystem>

#include "mesozeta/zero_table.hpp"

namespace mesozeta {

struct ZeroSearchOptions {
  unsigned threads = 0;
  // Z samples per Gram interval before any refinement; 1 means Gram points only.
  int samples_per_gram_interval = 1;
};

// Gram point g_n, the solution of theta(g) = n pi, for n >= -1.
double gram_point(long n);

// Zeros of Z on [t1, t2] refined to `precision` (bracket width). Counts are
// certified with Turing's method in Brent's form: enough Rosser blocks
// around the range pin N(g) at good Gram points on both sides.
// Requires 10 <= t1 < t2 <= 1e7 and precision >= 1e-9.
ZeroTable find_zeros(double t1, double t2, double precision, const ZeroSearchOptions& opts = {});

// Certified N(T), the number of zeros with 0 < gamma <= T. T >= 10.
std::int64_t count_zeros(double T, const ZeroSearchOptions& opts = {});

struct ZeroTableCheck {
  std::int64_t certified = 0;
  std::int64_t listed = 0;
  bool ok() const noexcept { return certified == listed; }
};
// Compares the table's size with the certified count over its coverage.
ZeroTableCheck verify_zero_table(const ZeroTable& table, const ZeroSearchOptions& opts = {});

// Loads a cached table covering (0, height] from the data directory, or
// computes one (and caches it when a data directory is configured).
ZeroTable ensure_zero_table(double height, const ZeroSearchOptions& opts = {});

// Minimal block count for Brent's certification at height g.
int brent_block_count(double g);

}  // namespace mesozeta
