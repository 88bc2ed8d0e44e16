#include "mesozeta/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <boost/version.hpp>

#include "mesozeta/errors.hpp"
#include "mesozeta/parallel.hpp"
#include "mesozeta/rng.hpp"
#include "mesozeta/zeros.hpp"

namespace mesozeta {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Side parse_side(const std::string& s) {
  if (s == "zero") return Side::zero;
  if (s == "prime") return Side::prime;
  if (s == "both") return Side::both;
  throw ConfigError("side: expected zero|prime|both, got '" + s + "'");
}

Normalize parse_normalize(const std::string& s) {
  if (s == "none") return Normalize::none;
  if (s == "sigma_t") return Normalize::sigma_t;
  throw ConfigError("normalize: expected none|sigma_t, got '" + s + "'");
}

std::vector<TestFunction> parse_all(const std::vector<std::string>& specs) {
  std::vector<TestFunction> out;
  for (const auto& s : specs) {
    try {
      out.push_back(parse_function(s));
    } catch (const Error& e) {
      throw ConfigError("functions: '" + s + "': " + e.what());
    }
  }
  return out;
}

bool needs_zeros(Side s) { return s != Side::prime; }
bool needs_primes(Side s) { return s != Side::zero; }

// Tables shared by every (function, t) block of a run.
struct Resources {
  ZeroTable zeros;
  PrimeTable primes = PrimeTable::sieve(2);
};

Resources acquire(const ExperimentConfig& c, const std::vector<TestFunction>& fns) {
  Resources r;
  if (needs_zeros(c.side)) {
    double need = 0.0;
    for (const auto& f : fns)
      for (double t : c.t_list) need = std::max(need, required_zero_height(f, t, c.lambda_rule.at(t)));
    if (c.zeros_file) {
      r.zeros = load_zero_table(*c.zeros_file);
      if (r.zeros.height() < need) {
        throw CoverageError("zero table " + c.zeros_file->string() + " reaches " + num(r.zeros.height()) +
                            " but the run needs zeros to " + num(need) + "; run `zeros compute --to " +
                            num(std::ceil(need)) + "`");
      }
    } else {
      ZeroSearchOptions opts;
      opts.threads = c.threads;
      r.zeros = ensure_zero_table(need, opts);
    }
  }
  if (needs_primes(c.side)) {
    double u2 = 0.0;
    for (double t : c.t_list) u2 = std::max(u2, std::pow(t, 2.0 * c.alpha));
    r.primes = PrimeTable::acquire(static_cast<std::uint64_t>(std::ceil(u2)));
  }
  return r;
}

// Fixed-order sums so the summary is independent of the thread count.
struct Moments {
  double mean = 0.0, m2 = 0.0, m3 = 0.0, m4 = 0.0, m5 = 0.0;
};

Moments central_moments(const std::vector<double>& x) {
  Moments m;
  const double n = static_cast<double>(x.size());
  for (double v : x) m.mean += v;
  m.mean /= n;
  for (double v : x) {
    const double d = v - m.mean, d2 = d * d;
    m.m2 += d2;
    m.m3 += d2 * d;
    m.m4 += d2 * d2;
    m.m5 += d2 * d2 * d;
  }
  m.m2 /= n;
  m.m3 /= n;
  m.m4 /= n;
  m.m5 /= n;
  return m;
}

double covariance(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (double v : x) mx += v;
  for (double v : y) my += v;
  mx /= n;
  my /= n;
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - mx) * (y[i] - my);
  return s / n;
}

double statistic_of(const SampleRow& r, Side side) { return side == Side::prime ? r.prime_full : r.zero_side; }

struct Block {
  RunBlock run;
  std::vector<double> stat;
};

Block evaluate_block(const ExperimentConfig& c, const TestFunction& f, const NormBundle& fnorms, double t,
                     const Resources& res) {
  const double lambda = c.lambda_rule.at(t);
  const ScalePoint base = ScalePoint::make(1.5, t, lambda, c.alpha);
  Block b;
  b.run.function = f.name;
  b.run.t = t;
  b.run.lambda = lambda;
  b.run.u = base.u;
  b.run.sigma_t_sq = sigma_t_sq(f, lambda);
  const HHalf h = h_half_inner(f, f);
  b.run.h_half_sq = h.divergent ? kNaN : h.value;
  const double theory = c.normalize == Normalize::sigma_t ? b.run.sigma_t_sq : b.run.h_half_sq;

  std::optional<PrimeSideKernel> kernel;
  if (needs_primes(c.side)) kernel.emplace(f, base, res.primes);

  const auto n = static_cast<std::size_t>(c.n_samples);
  b.run.rows.resize(n);
  parallel_for(n, c.threads, [&](std::size_t i) {
    const ScalePoint s = base.with_omega(draw_omega(c.seed, i));
    SampleRow& r = b.run.rows[i];
    r = {s.omega, t, lambda, s.u, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN};
    if (c.side == Side::both) {
      const LinStatSample x = explicit_residual(f, res.zeros, *kernel, s, fnorms);
      r.zero_side = x.zero_side;
      r.prime_full = x.prime_full;
      r.prime_primes = x.prime_primes;
      r.prime_powers = x.prime_powers;
      r.residual = x.residual;
    } else if (c.side == Side::zero) {
      r.zero_side = zero_side_stat(f, res.zeros, s).value;
    } else {
      const PrimeSide p = kernel->evaluate(s.omega);
      r.prime_full = p.full;
      r.prime_primes = p.primes;
      r.prime_powers = p.powers;
    }
    const double v = statistic_of(r, c.side);
    r.normalized = c.normalize == Normalize::sigma_t ? v / std::sqrt(b.run.sigma_t_sq) : v;
  });

  b.stat.reserve(n);
  for (const auto& r : b.run.rows) b.stat.push_back(statistic_of(r, c.side));
  b.run.stats = summarize(b.stat, theory);
  return b;
}

nlohmann::json stats_json(const SummaryStats& s) {
  return {{"n", s.n},
          {"mean", s.mean},
          {"variance", s.variance},
          {"skewness", s.skewness},
          {"excess_kurtosis", s.excess_kurtosis},
          {"fifth_moment", s.fifth_moment},
          {"ks_distance", s.ks_distance},
          {"theoretical_variance", s.theoretical_variance}};
}

std::filesystem::path prepare_output(const ExperimentConfig& c) {
  std::error_code ec;
  std::filesystem::create_directories(c.output, ec);
  if (ec) throw IoError("cannot create output directory " + c.output.string() + ": " + ec.message());
  return c.output;
}

std::vector<Block> run_blocks(const ExperimentConfig& c, const std::vector<TestFunction>& fns,
                              const Resources& res) {
  std::vector<Block> blocks;
  for (const auto& f : fns) {
    const NormBundle fn_norms = c.side == Side::both ? norms(f) : NormBundle{};
    for (double t : c.t_list) blocks.push_back(evaluate_block(c, f, fn_norms, t, res));
  }
  return blocks;
}

}  // namespace

// ------------------------------------------------------------ config

double LambdaRule::at(double t) const {
  if (kind == Kind::fixed) return lambda;
  return c * std::pow(std::log(t), beta);
}

LambdaRule LambdaRule::fixed_value(double lambda) {
  LambdaRule r;
  r.kind = Kind::fixed;
  r.lambda = lambda;
  return r;
}

LambdaRule LambdaRule::power_law(double c, double beta) {
  LambdaRule r;
  r.kind = Kind::power;
  r.c = c;
  r.beta = beta;
  return r;
}

const char* to_string(Side s) {
  switch (s) {
    case Side::zero: return "zero";
    case Side::prime: return "prime";
    case Side::both: return "both";
  }
  return "?";
}

const char* to_string(Normalize n) { return n == Normalize::none ? "none" : "sigma_t"; }

void ExperimentConfig::validate() const {
  if (t_list.empty()) throw ConfigError("t_list: at least one t is required");
  if (n_samples < 1) throw ConfigError("n_samples: must be >= 1, got " + std::to_string(n_samples));
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha: must lie in (0, 1], got " + num(alpha));
  if (lambda_rule.kind == LambdaRule::Kind::power) {
    if (!(lambda_rule.beta > 0.0 && lambda_rule.beta < 1.0))
      throw ConfigError("lambda_rule.beta: must lie in (0, 1), got " + num(lambda_rule.beta));
    if (!(lambda_rule.c > 0.0)) throw ConfigError("lambda_rule.c: must be positive");
  }
  for (double t : t_list) {
    if (!(t >= 100.0) || !std::isfinite(t)) throw ConfigError("t_list: entries must be finite and >= 100, got " + num(t));
    const double l = lambda_rule.at(t);
    if (!(l > 0.0 && l < std::log(t)))
      throw ConfigError("lambda: need 0 < lambda < log t; at t = " + num(t) + " lambda = " + num(l));
  }
  if (functions.empty()) throw ConfigError("functions: at least one test function is required");
  parse_all(functions);
}

nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json rule;
  if (c.lambda_rule.kind == LambdaRule::Kind::fixed) {
    rule = {{"kind", "fixed"}, {"lambda", c.lambda_rule.lambda}};
  } else {
    rule = {{"kind", "power"}, {"c", c.lambda_rule.c}, {"beta", c.lambda_rule.beta}};
  }
  return {{"t_list", c.t_list},
          {"lambda_rule", rule},
          {"alpha", c.alpha},
          {"n_samples", c.n_samples},
          {"seed", c.seed},
          {"functions", c.functions},
          {"side", to_string(c.side)},
          {"normalize", to_string(c.normalize)},
          {"output", c.output.string()},
          {"zeros_file", c.zeros_file ? nlohmann::json(c.zeros_file->string()) : nlohmann::json(nullptr)},
          {"threads", c.threads}};
}

ExperimentConfig config_from_json(const nlohmann::json& j_in, ExperimentConfig c) {
  // A manifest carries the config under "config".
  const nlohmann::json& j = j_in.contains("config") && j_in.contains("command") ? j_in.at("config") : j_in;
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  std::string key;
  try {
    for (const auto& [k, v] : j.items()) {
      key = k;
      if (k == "t_list") {
        c.t_list = v.is_array() ? v.get<std::vector<double>>() : std::vector<double>{v.get<double>()};
      } else if (k == "lambda_rule") {
        const std::string kind = v.at("kind").get<std::string>();
        if (kind == "fixed") {
          c.lambda_rule = LambdaRule::fixed_value(v.at("lambda").get<double>());
        } else if (kind == "power") {
          c.lambda_rule = LambdaRule::power_law(v.value("c", 1.0), v.value("beta", 0.7));
        } else {
          throw ConfigError("lambda_rule.kind: expected fixed|power, got '" + kind + "'");
        }
      } else if (k == "alpha") {
        c.alpha = v.get<double>();
      } else if (k == "n_samples") {
        c.n_samples = v.get<std::int64_t>();
      } else if (k == "seed") {
        c.seed = v.get<std::uint64_t>();
      } else if (k == "functions") {
        c.functions = v.is_array() ? v.get<std::vector<std::string>>() : std::vector<std::string>{v.get<std::string>()};
      } else if (k == "side") {
        c.side = parse_side(v.get<std::string>());
      } else if (k == "normalize") {
        c.normalize = parse_normalize(v.get<std::string>());
      } else if (k == "output") {
        c.output = v.get<std::string>();
      } else if (k == "zeros_file") {
        if (v.is_null()) c.zeros_file.reset();
        else c.zeros_file = v.get<std::string>();
      } else if (k == "threads") {
        c.threads = v.get<unsigned>();
      } else {
        throw ConfigError("config: unknown key '" + k + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config: bad value for '" + key + "': " + e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

// ------------------------------------------------------------ statistics

double ks_statistic(std::vector<double> x, double mean, double var) {
  if (x.empty()) throw DomainError("ks_statistic: no samples");
  if (!(var > 0.0) || !std::isfinite(var)) throw DomainError("ks_statistic: variance must be positive and finite");
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  const double scale = 1.0 / std::sqrt(2.0 * var);
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double F = 0.5 * std::erfc(-(x[i] - mean) * scale);
    d = std::max({d, std::abs((i + 1) / n - F), std::abs(i / n - F)});
  }
  return d;
}

SummaryStats summarize(const std::vector<double>& x, double theoretical_variance) {
  if (x.empty()) throw DomainError("summarize: no samples");
  const Moments m = central_moments(x);
  SummaryStats s;
  s.n = static_cast<std::int64_t>(x.size());
  s.mean = m.mean;
  s.variance = m.m2;
  s.skewness = m.m2 > 0.0 ? m.m3 / std::pow(m.m2, 1.5) : kNaN;
  s.excess_kurtosis = m.m2 > 0.0 ? m.m4 / (m.m2 * m.m2) - 3.0 : kNaN;
  s.fifth_moment = m.m2 > 0.0 ? m.m5 / std::pow(m.m2, 2.5) : kNaN;
  s.theoretical_variance = theoretical_variance;
  s.ks_distance = theoretical_variance > 0.0 && std::isfinite(theoretical_variance)
                      ? ks_statistic(x, 0.0, theoretical_variance)
                      : kNaN;
  return s;
}

double draw_omega(std::uint64_t seed, std::uint64_t index) { return 1.0 + CounterRng(seed, 0).uniform(index); }

// ------------------------------------------------------------ output

std::string format_row(const SampleRow& r) {
  std::string out;
  const double v[] = {r.omega,       r.t,          r.lambda,       r.u,        r.zero_side,
                      r.prime_full,  r.prime_primes, r.prime_powers, r.residual, r.normalized};
  for (std::size_t i = 0; i < std::size(v); ++i) {
    if (i) out += ',';
    out += std::isnan(v[i]) ? std::string("nan") : num(v[i]);
  }
  return out;
}

void write_csv(const std::filesystem::path& path, const std::vector<SampleRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << kCsvHeader << '\n';
  for (const auto& r : rows) out << format_row(r) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

nlohmann::json version_info() {
  char boost_ver[32];
  std::snprintf(boost_ver, sizeof boost_ver, "%d.%d.%d", BOOST_VERSION / 100000, BOOST_VERSION / 100 % 1000,
                BOOST_VERSION % 100);
  char json_ver[32];
  std::snprintf(json_ver, sizeof json_ver, "%d.%d.%d", NLOHMANN_JSON_VERSION_MAJOR, NLOHMANN_JSON_VERSION_MINOR,
                NLOHMANN_JSON_VERSION_PATCH);
  return {{"mesozeta", MESOZETA_VERSION}, {"boost", boost_ver}, {"nlohmann_json", json_ver}, {"compiler", __VERSION__}};
}

nlohmann::json manifest(const ExperimentConfig& config, const std::string& command) {
  return {{"command", command},
          {"config", to_json(config)},
          {"versions", version_info()},
          {"rng", "philox4x32-10, omega = 1 + uniform(seed, stream 0, index)"}};
}

// ------------------------------------------------------------ runs

CltResult run_clt(const ExperimentConfig& c) {
  c.validate();
  const auto fns = parse_all(c.functions);
  const Resources res = acquire(c, fns);
  auto blocks = run_blocks(c, fns, res);

  CltResult out;
  for (auto& b : blocks) out.blocks.push_back(std::move(b.run));
  if (c.output.empty()) return out;

  const auto dir = prepare_output(c);
  const std::size_t nt = c.t_list.size();
  nlohmann::json summary = nlohmann::json::array();
  for (std::size_t fi = 0; fi < fns.size(); ++fi) {
    std::vector<SampleRow> rows;
    for (std::size_t ti = 0; ti < nt; ++ti) {
      const RunBlock& b = out.blocks[fi * nt + ti];
      rows.insert(rows.end(), b.rows.begin(), b.rows.end());
      summary.push_back({{"function", c.functions[fi]},
                         {"t", b.t},
                         {"lambda", b.lambda},
                         {"u", b.u},
                         {"side", to_string(c.side)},
                         {"normalize", to_string(c.normalize)},
                         {"sigma_t_sq", b.sigma_t_sq},
                         {"h_half_sq", b.h_half_sq},
                         {"stats", stats_json(b.stats)}});
    }
    const auto file = dir / (fns.size() == 1 ? std::string("samples.csv") : "samples_" + std::to_string(fi) + ".csv");
    write_csv(file, rows);
    out.files.push_back(file);
  }
  write_json(dir / "summary.json", summary);
  write_json(dir / "manifest.json", manifest(c, "clt"));
  out.files.push_back(dir / "summary.json");
  out.files.push_back(dir / "manifest.json");
  return out;
}

CovarianceResult run_covariance(const ExperimentConfig& c) {
  c.validate();
  const auto fns = parse_all(c.functions);
  for (std::size_t i = 0; i < fns.size(); ++i) {
    const HypothesisReport h = check_hypotheses(fns[i]);
    if (h.covariance_admissible()) continue;
    std::string failed;
    if (!h.decay_ok) failed = "decay";
    else if (!h.bv_f1_ok) failed = "bounded variation of f'";
    else if (!h.fourier_decay_ok) failed = "Fourier decay";
    else failed = "finite H^1/2 norm";
    throw ConfigError("functions: '" + c.functions[i] + "' is not admissible for the covariance run: " + failed +
                      " fails");
  }

  ExperimentConfig one = c;
  one.t_list = {c.t_list.front()};
  const Resources res = acquire(one, fns);
  const auto blocks = run_blocks(one, fns, res);

  CovarianceResult r;
  r.functions = c.functions;
  r.t = one.t_list.front();
  r.lambda = c.lambda_rule.at(r.t);
  const std::size_t k = fns.size();
  r.empirical.assign(k, std::vector<double>(k));
  r.theoretical.assign(k, std::vector<double>(k));
  double diff = 0.0, norm = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (j < i) {
        r.empirical[i][j] = r.empirical[j][i];
        r.theoretical[i][j] = r.theoretical[j][i];
      } else {
        r.empirical[i][j] = i == j ? blocks[i].run.stats.variance : covariance(blocks[i].stat, blocks[j].stat);
        if (c.normalize == Normalize::sigma_t) {
          // Truncated Gram entry: integral over [-lambda, lambda] of |u| fhat conj(ghat).
          r.theoretical[i][j] = i == j ? blocks[i].run.sigma_t_sq
                                       : sigma_t_sq(linear_combination(1.0, fns[i], 1.0, fns[j]), r.lambda) / 2.0 -
                                             (blocks[i].run.sigma_t_sq + blocks[j].run.sigma_t_sq) / 2.0;
        } else {
          r.theoretical[i][j] = i == j ? blocks[i].run.h_half_sq : h_half_inner(fns[i], fns[j]).value;
        }
      }
      const double d = r.empirical[i][j] - r.theoretical[i][j];
      diff += d * d;
      norm += r.theoretical[i][j] * r.theoretical[i][j];
    }
  }
  r.frobenius_relative = std::sqrt(diff / norm);

  if (!c.output.empty()) {
    const auto dir = prepare_output(c);
    write_json(dir / "covariance.json", {{"functions", r.functions},
                                         {"t", r.t},
                                         {"lambda", r.lambda},
                                         {"empirical", r.empirical},
                                         {"theoretical", r.theoretical},
                                         {"frobenius_relative", r.frobenius_relative}});
    write_json(dir / "manifest.json", manifest(c, "cov"));
  }
  return r;
}

std::vector<ExplicitRow> run_explicit_check(const ExperimentConfig& c) {
  if (c.side != Side::both) throw ConfigError("side: the explicit-formula check needs side = both");
  c.validate();
  const auto fns = parse_all({c.functions.front()});
  const Resources res = acquire(c, fns);
  const auto blocks = run_blocks(c, fns, res);
  const NormBundle fn_norms = norms(fns.front());

  std::vector<ExplicitRow> table;
  std::vector<SampleRow> all;
  for (const auto& b : blocks) {
    ExplicitRow row{b.run.t, b.run.lambda, b.run.u, 0.0, 0.0, residual_envelope(fn_norms, b.run.t, b.run.lambda)};
    for (const auto& r : b.run.rows) {
      row.mean_abs_residual += std::abs(r.residual);
      row.max_abs_residual = std::max(row.max_abs_residual, std::abs(r.residual));
    }
    row.mean_abs_residual /= static_cast<double>(b.run.rows.size());
    table.push_back(row);
    all.insert(all.end(), b.run.rows.begin(), b.run.rows.end());
  }

  if (!c.output.empty()) {
    const auto dir = prepare_output(c);
    std::ofstream out(dir / "residuals.csv", std::ios::binary);
    if (!out) throw IoError("cannot write " + (dir / "residuals.csv").string());
    out << "t,lambda,u,mean_abs_residual,max_abs_residual,envelope\n";
    for (const auto& r : table) {
      out << num(r.t) << ',' << num(r.lambda) << ',' << num(r.u) << ',' << num(r.mean_abs_residual) << ','
          << num(r.max_abs_residual) << ',' << num(r.envelope) << '\n';
    }
    write_csv(dir / "samples.csv", all);
    write_json(dir / "manifest.json", manifest(c, "explicit-check"));
  }
  return table;
}

}  // namespace mesozeta
