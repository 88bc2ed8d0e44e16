#include "mesozeta/zero_table.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mesozeta/errors.hpp"

namespace mesozeta {
namespace {

std::string shortest(double x) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc() && r.ptr == s.data() + s.size() && std::isfinite(out);
}

[[noreturn]] void parse_fail(const std::filesystem::path& path, std::size_t line, const std::string& msg) {
  std::ostringstream os;
  os << path.string() << ":" << line << ": " << msg;
  throw ParseError(os.str());
}

}  // namespace

ZeroTable::ZeroTable(std::vector<double> ordinates, double height, double precision, std::string provenance,
                     double floor)
    : ordinates_(std::move(ordinates)),
      height_(height),
      precision_(precision),
      floor_(floor),
      provenance_(std::move(provenance)) {
  if (!(height > 0.0) || !std::isfinite(height)) throw DomainError("ZeroTable: height must be positive");
  if (!(precision > 0.0)) throw DomainError("ZeroTable: precision must be positive");
  if (!(floor >= 0.0 && floor < height)) throw DomainError("ZeroTable: floor must lie in [0, height)");
  for (std::size_t i = 0; i < ordinates_.size(); ++i) {
    const double g = ordinates_[i];
    if (!(g > floor_) || g > height_) {
      std::ostringstream os;
      os << "ZeroTable: ordinate " << g << " outside (" << floor_ << ", " << height_ << "]";
      throw DomainError(os.str());
    }
    if (i > 0 && !(g > ordinates_[i - 1])) throw DomainError("ZeroTable: ordinates must be strictly ascending");
    if (i > 0 && g - ordinates_[i - 1] <= 2.0 * precision_) {
      std::ostringstream os;
      os << "ZeroTable: ordinates " << ordinates_[i - 1] << " and " << g << " within 2*precision";
      throw DomainError(os.str());
    }
  }
}

std::span<const double> ZeroTable::window(double lo, double hi) const {
  if (!(hi >= lo)) return {};
  auto b = std::lower_bound(ordinates_.begin(), ordinates_.end(), lo);
  auto e = std::upper_bound(b, ordinates_.end(), hi);
  return {ordinates_.data() + (b - ordinates_.begin()), static_cast<std::size_t>(e - b)};
}

ZeroTable ZeroTable::slice(double lo, double hi) const {
  lo = std::max(lo, floor_);
  hi = std::min(hi, height_);
  if (!(hi > lo)) throw DomainError("ZeroTable::slice: empty range");
  auto b = std::upper_bound(ordinates_.begin(), ordinates_.end(), lo);
  auto e = std::upper_bound(b, ordinates_.end(), hi);
  return ZeroTable(std::vector<double>(b, e), hi, precision_, provenance_, lo);
}

void save_zero_table(const ZeroTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write zero table " + path.string());
  out << "# zero ordinates gamma of zeta(1/2 + i gamma)\n";
  out << "# height=" << shortest(table.height()) << "\n";
  out << "# precision=" << shortest(table.precision()) << "\n";
  out << "# floor=" << shortest(table.floor()) << "\n";
  out << "# provenance=" << table.provenance() << "\n";
  for (double g : table.ordinates()) out << shortest(g) << "\n";
  if (!out) throw IoError("short write to zero table " + path.string());
}

ZeroTable load_zero_table(const std::filesystem::path& path, std::optional<double> declared_height,
                          std::optional<double> declared_precision) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open zero table " + path.string());
  std::optional<double> height, precision;
  double floor = 0.0;
  std::string provenance;
  std::vector<double> ords;
  std::string raw;
  std::size_t lineno = 0;
  std::vector<std::size_t> lines;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      line = trim(line.substr(1));
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) continue;
      const auto key = trim(line.substr(0, eq));
      const auto val = trim(line.substr(eq + 1));
      double v = 0.0;
      if (key == "height" || key == "precision" || key == "floor") {
        if (!parse_double(val, v)) parse_fail(path, lineno, "bad value for " + std::string(key));
        if (key == "height") height = v;
        if (key == "precision") precision = v;
        if (key == "floor") floor = v;
      } else if (key == "provenance") {
        provenance = std::string(val);
      }
      continue;
    }
    double g = 0.0;
    if (!parse_double(line, g)) parse_fail(path, lineno, "not a number: '" + std::string(line) + "'");
    if (!ords.empty() && !(g > ords.back())) {
      parse_fail(path, lineno, "ordinates out of order (" + std::string(line) + " after " + shortest(ords.back()) + ")");
    }
    ords.push_back(g);
    lines.push_back(lineno);
  }
  if (declared_height) height = declared_height;
  if (declared_precision) precision = declared_precision;
  if (!height) throw ParseError(path.string() + ": no height declared (header '# height=' or argument)");
  if (!precision) throw ParseError(path.string() + ": no precision declared (header '# precision=' or argument)");
  for (std::size_t i = 0; i < ords.size(); ++i) {
    if (!(ords[i] > floor) || ords[i] > *height) {
      parse_fail(path, lines[i], "ordinate " + shortest(ords[i]) + " outside declared coverage");
    }
    if (i > 0 && ords[i] - ords[i - 1] <= 2.0 * *precision) {
      parse_fail(path, lines[i], "duplicate ordinate within 2*precision of the previous line");
    }
  }
  if (provenance.empty() || declared_height || declared_precision) {
    provenance = "ingested:" + path.filename().string();
  }
  return ZeroTable(std::move(ords), *height, *precision, provenance, floor);
}

}  // namespace mesozeta
