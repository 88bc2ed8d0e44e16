#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mesozeta/linstat.hpp"

namespace mesozeta {

struct LambdaRule {
  enum class Kind { fixed, power };
  Kind kind = Kind::power;
  double lambda = 0.0;  // fixed
  double c = 1.0;       // power: c (log t)^beta
  double beta = 0.7;

  double at(double t) const;
  static LambdaRule fixed_value(double lambda);
  static LambdaRule power_law(double c, double beta);
};

enum class Side { zero, prime, both };
enum class Normalize { none, sigma_t };

struct ExperimentConfig {
  std::vector<double> t_list;
  LambdaRule lambda_rule;
  double alpha = 0.5;
  std::int64_t n_samples = 1000;
  std::uint64_t seed = 1;
  std::vector<std::string> functions{"gaussian:0,1"};
  Side side = Side::prime;
  Normalize normalize = Normalize::none;
  std::filesystem::path output;
  std::optional<std::filesystem::path> zeros_file;
  unsigned threads = 0;

  // Throws ConfigError naming the offending field.
  void validate() const;
};

nlohmann::json to_json(const ExperimentConfig& c);
// Missing keys keep the defaults above; unknown keys raise ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path);

const char* to_string(Side s);
const char* to_string(Normalize n);

struct SummaryStats {
  std::int64_t n = 0;
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double fifth_moment = 0.0;  // standardized; reported, never asserted
  double ks_distance = 0.0;
  double theoretical_variance = 0.0;
};

// Moments use the population normalization (divide by n); KS is against
// N(0, theoretical_variance). Throws DomainError for empty input.
SummaryStats summarize(const std::vector<double>& x, double theoretical_variance);

// sup_i max(|i/n - F(x_i)|, |(i-1)/n - F(x_i)|) for the N(mean, var) CDF.
double ks_statistic(std::vector<double> samples, double mean, double var);

// omega_i in (1, 2) for sample i.
double draw_omega(std::uint64_t seed, std::uint64_t index);

struct SampleRow {
  double omega, t, lambda, u;
  double zero_side, prime_full, prime_primes, prime_powers, residual, normalized;
};

inline constexpr const char* kCsvHeader =
    "omega,t,lambda,u,zero_side,prime_full,prime_primes,prime_powers,residual,normalized";

std::string format_row(const SampleRow& r);
void write_csv(const std::filesystem::path& path, const std::vector<SampleRow>& rows);

struct RunBlock {
  std::string function;
  double t = 0.0, lambda = 0.0, u = 0.0;
  std::vector<SampleRow> rows;
  SummaryStats stats;     // of the side's statistic (zero side when both)
  double sigma_t_sq = 0.0;
  double h_half_sq = 0.0;  // NaN when divergent
};

struct CltResult {
  std::vector<RunBlock> blocks;  // functions x t_list, function-major
  std::vector<std::filesystem::path> files;
};

// Draws n_samples omegas and evaluates the requested sides for every
// function and t. Writes samples CSVs, summary.json and manifest.json under
// config.output when it is non-empty.
CltResult run_clt(const ExperimentConfig& config);

struct CovarianceResult {
  std::vector<std::string> functions;
  std::vector<std::vector<double>> empirical;
  std::vector<std::vector<double>> theoretical;
  double frobenius_relative = 0.0;
  double t = 0.0, lambda = 0.0;
};

// Empirical covariance of (S(f_1), ..., S(f_k)) at the first t against the
// H^{1/2} Gram matrix. Throws ConfigError for an inadmissible function.
CovarianceResult run_covariance(const ExperimentConfig& config);

struct ExplicitRow {
  double t, lambda, u;
  double mean_abs_residual, max_abs_residual, envelope;
};

// Residual scaling table over t_list for the first function (side must be
// both). Writes residuals.csv plus the per-sample CSV.
std::vector<ExplicitRow> run_explicit_check(const ExperimentConfig& config);

// Library and compiler versions recorded in every manifest.
nlohmann::json version_info();

// Manifest: resolved config plus library versions.
nlohmann::json manifest(const ExperimentConfig& config, const std::string& command);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace mesozeta
