#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mesozeta {

// Ascending ordinates of zeros 1/2 + i*gamma with coverage certified on
// (floor, height]. Immutable once built; the constructor validates.
class ZeroTable {
 public:
  ZeroTable() = default;
  ZeroTable(std::vector<double> ordinates, double height, double precision, std::string provenance,
            double floor = 0.0);

  const std::vector<double>& ordinates() const noexcept { return ordinates_; }
  std::size_t size() const noexcept { return ordinates_.size(); }
  bool empty() const noexcept { return ordinates_.empty(); }
  double height() const noexcept { return height_; }
  double floor() const noexcept { return floor_; }
  double precision() const noexcept { return precision_; }
  const std::string& provenance() const noexcept { return provenance_; }

  // Ordinates in the closed interval [lo, hi].
  std::span<const double> window(double lo, double hi) const;

  // Sub-table covering (lo, hi]; used to check additivity of zero sums.
  ZeroTable slice(double lo, double hi) const;

 private:
  std::vector<double> ordinates_;
  double height_ = 0.0;
  double precision_ = 0.0;
  double floor_ = 0.0;
  std::string provenance_;
};

// Text format: '#'-prefixed metadata lines (height=, precision=, floor=,
// provenance=), then one decimal ordinate per line.
void save_zero_table(const ZeroTable& table, const std::filesystem::path& path);

// Declared values override the file's metadata; published tables without
// a header need both. Ordinates out of order, non-numeric, above the
// height, or closer than 2*precision raise ParseError with the line number.
ZeroTable load_zero_table(const std::filesystem::path& path,
                          std::optional<double> declared_height = std::nullopt,
                          std::optional<double> declared_precision = std::nullopt);

}  // namespace mesozeta
