#include "mesozeta/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>

#include <CLI11.hpp>

#include "mesozeta/errors.hpp"
#include "mesozeta/experiment.hpp"
#include "mesozeta/testfns.hpp"
#include "mesozeta/zeros.hpp"
#include "mesozeta/zeta.hpp"

namespace mesozeta::cli {

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

// Integers given as "10000" or "1e4".
std::uint64_t parse_count(const std::string& flag, const std::string& s) {
  try {
    std::size_t pos = 0;
    if (s.find_first_of("eE.") == std::string::npos) {
      const unsigned long long v = std::stoull(s, &pos);
      if (pos == s.size() && s.front() != '-') return v;
    } else {
      const double d = std::stod(s, &pos);
      if (pos == s.size() && d >= 0.0 && d < 0x1.0p64 && d == std::floor(d)) return static_cast<std::uint64_t>(d);
    }
  } catch (const std::exception&) {
  }
  throw ConfigError(flag + ": expected a nonnegative integer, got '" + s + "'");
}

LambdaRule parse_rule(const std::string& s) {
  const auto colon = s.find(':');
  const std::string kind = s.substr(0, colon);
  std::vector<double> p;
  if (colon != std::string::npos) {
    std::string rest = s.substr(colon + 1);
    std::size_t start = 0;
    while (start <= rest.size()) {
      const auto comma = rest.find(',', start);
      const std::string tok = rest.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      try {
        std::size_t pos = 0;
        p.push_back(std::stod(tok, &pos));
        if (pos != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ConfigError("--lambda-rule: bad number '" + tok + "'");
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  if (kind == "fixed" && p.size() == 1) return LambdaRule::fixed_value(p[0]);
  if (kind == "power" && p.size() <= 2) {
    return LambdaRule::power_law(p.empty() ? 1.0 : p[0], p.size() < 2 ? 0.7 : p[1]);
  }
  throw ConfigError("--lambda-rule: expected fixed:L or power:c,beta, got '" + s + "'");
}

struct ExperimentFlags {
  std::vector<double> t;
  double lambda = 0.0;
  std::string lambda_rule;
  double alpha = 0.5;
  std::string samples = "1000";
  std::string seed = "1";
  std::vector<std::string> fn;
  std::string side;
  std::string normalize;
  std::string out;
  std::string zeros_file;
  std::string config;
  unsigned threads = 0;
  std::map<std::string, CLI::Option*> opts;

  void attach(CLI::App* app, const std::string& default_side) {
    side = default_side;
    opts["t"] = app->add_option("--t", t, "Heights t (repeat or comma-separate)")->delimiter(',');
    opts["lambda"] = app->add_option("--lambda", lambda, "Fixed scale lambda");
    opts["lambda-rule"] = app->add_option("--lambda-rule", lambda_rule, "fixed:L or power:c,beta (lambda = c (log t)^beta)");
    opts["lambda"]->excludes(opts["lambda-rule"]);
    opts["alpha"] = app->add_option("--alpha", alpha, "Exponent of u = t^alpha")->capture_default_str();
    opts["samples"] = app->add_option("--samples", samples, "Number of omega draws")->capture_default_str();
    opts["seed"] = app->add_option("--seed", seed, "64-bit seed")->capture_default_str();
    opts["fn"] = app->add_option("--fn", fn, "Test function name[:params] (repeatable)");
    opts["side"] = app->add_option("--side", side, "zero, prime or both")->capture_default_str();
    opts["normalize"] = app->add_option("--normalize", normalize, "none or sigma_t");
    opts["out"] = app->add_option("--out", out, "Output directory");
    opts["zeros-file"] = app->add_option("--zeros-file", zeros_file, "Zero table to use instead of the cache");
    opts["config"] = app->add_option("--config", config, "Config or manifest JSON; explicit flags win");
    opts["threads"] = app->add_option("--threads", threads, "Worker cap (0 = all cores)")->capture_default_str();
  }

  bool given(const std::string& k) const { return opts.at(k)->count() > 0; }

  ExperimentConfig resolve() const {
    ExperimentConfig c;
    c.side = Side::prime;
    if (given("config")) c = load_config(config);
    // Defaults of the verb apply unless a config file set the field.
    if (given("side") || !given("config")) c = config_from_json({{"side", side}}, c);
    if (given("t")) c.t_list = t;
    if (given("lambda")) c.lambda_rule = LambdaRule::fixed_value(lambda);
    if (given("lambda-rule")) c.lambda_rule = parse_rule(lambda_rule);
    if (given("alpha")) c.alpha = alpha;
    if (given("samples")) c.n_samples = static_cast<std::int64_t>(parse_count("--samples", samples));
    if (given("seed")) c.seed = parse_count("--seed", seed);
    if (given("fn")) c.functions = fn;
    if (given("normalize")) c = config_from_json({{"normalize", normalize}}, c);
    if (given("out")) c.output = out;
    if (given("zeros-file")) c.zeros_file = zeros_file;
    if (given("threads")) c.threads = threads;
    c.validate();
    return c;
  }
};

std::string stats_line(const SummaryStats& s) {
  return "n=" + std::to_string(s.n) + " mean=" + num(s.mean) + " variance=" + num(s.variance) +
         " skewness=" + num(s.skewness) + " excess_kurtosis=" + num(s.excess_kurtosis) +
         " ks=" + num(s.ks_distance) + " theoretical_variance=" + num(s.theoretical_variance);
}

void write_sidecar_manifest(const std::filesystem::path& file, const std::string& command, nlohmann::json args) {
  write_json(file.string() + ".manifest.json",
             {{"command", command}, {"arguments", std::move(args)}, {"versions", version_info()}});
}

struct Commands {
  CLI::App app{"Linear statistics of zeta zeros at mesoscopic scales", "mesozeta"};

  // zeros
  CLI::App* zeros = nullptr;
  CLI::App *z_compute = nullptr, *z_verify = nullptr, *z_import = nullptr;
  double z_from = 10.0, z_to = 0.0, z_precision = 1e-9, z_height = 0.0;
  std::string z_out, z_table;
  unsigned z_threads = 0;

  // fn
  CLI::App* fn = nullptr;
  CLI::App *fn_list = nullptr, *fn_describe = nullptr;
  std::string fn_name;

  CLI::App* selberg = nullptr;
  double s_sigma = 2.0, s_tau = 0.0, s_u = 10.0;
  std::string s_zeros;

  CLI::App* variance = nullptr;
  std::string v_fn = "gaussian";
  double v_lambda = 0.0;

  CLI::App *explicit_check = nullptr, *clt = nullptr, *cov = nullptr;
  ExperimentFlags explicit_flags, clt_flags, cov_flags;

  Commands() {
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);
    app.set_version_flag("--version", MESOZETA_VERSION);

    zeros = app.add_subcommand("zeros", "Compute, verify or import zero tables");
    zeros->require_subcommand(1);
    z_compute = zeros->add_subcommand("compute", "Zeros of Z on [from, to] with certified count");
    z_compute->add_option("--from", z_from, "Lower height (>= 10)")->capture_default_str();
    z_compute->add_option("--to", z_to, "Upper height")->required();
    z_compute->add_option("--precision", z_precision, "Bracket width")->capture_default_str();
    z_compute->add_option("--out", z_out, "Output table file")->required();
    z_compute->add_option("--threads", z_threads, "Worker cap (0 = all cores)")->capture_default_str();
    z_verify = zeros->add_subcommand("verify", "Compare a table's size with the certified count");
    z_verify->add_option("--table", z_table, "Zero table file")->required();
    z_verify->add_option("--threads", z_threads, "Worker cap (0 = all cores)")->capture_default_str();
    z_import = zeros->add_subcommand("import", "Load a published table and save it in native format");
    z_import->add_option("--table", z_table, "Published table (one ordinate per line)")->required();
    z_import->add_option("--height", z_height, "Coverage height of the table");
    z_import->add_option("--precision", z_precision, "Accuracy of the listed ordinates")->capture_default_str();
    z_import->add_option("--out", z_out, "Output table file")->required();

    fn = app.add_subcommand("fn", "Built-in test functions");
    fn->require_subcommand(1);
    fn_list = fn->add_subcommand("list", "Print the catalog");
    fn_describe = fn->add_subcommand("describe", "Print the hypothesis report of one function");
    fn_describe->add_option("name", fn_name, "name[:params]")->required();

    selberg = app.add_subcommand("selberg-check", "Four-term decomposition of zeta'/zeta at one point");
    selberg->add_option("--sigma", s_sigma, "Real part of s")->capture_default_str();
    selberg->add_option("--tau", s_tau, "Imaginary part of s")->capture_default_str();
    selberg->add_option("--u", s_u, "Smoothing height u")->capture_default_str();
    selberg->add_option("--zeros-file", s_zeros, "Zero table to use instead of the cache");

    variance = app.add_subcommand("variance", "Truncated variance and H^1/2 norm of a test function");
    variance->add_option("--fn", v_fn, "Test function name[:params]")->capture_default_str();
    variance->add_option("--lambda", v_lambda, "Truncation lambda")->required();

    explicit_check = app.add_subcommand("explicit-check", "Residual of the explicit formula across t");
    explicit_flags.attach(explicit_check, "both");
    clt = app.add_subcommand("clt", "Monte Carlo distribution of the linear statistic");
    clt_flags.attach(clt, "prime");
    cov = app.add_subcommand("cov", "Empirical covariance against the H^1/2 Gram matrix");
    cov_flags.attach(cov, "zero");
  }

  int run(std::ostream& out) {
    if (z_compute->parsed()) {
      ZeroSearchOptions opts;
      opts.threads = z_threads;
      const ZeroTable t = find_zeros(z_from, z_to, z_precision, opts);
      save_zero_table(t, z_out);
      write_sidecar_manifest(z_out, "zeros compute",
                             {{"from", z_from}, {"to", z_to}, {"precision", z_precision}, {"out", z_out}});
      out << "computed " << t.size() << " zeros on (" << num(t.floor()) << ", " << num(t.height()) << "] -> "
          << z_out << '\n';
      return 0;
    }
    if (z_verify->parsed()) {
      ZeroSearchOptions opts;
      opts.threads = z_threads;
      const ZeroTableCheck c = verify_zero_table(load_zero_table(z_table), opts);
      if (!c.ok()) {
        throw CertificationError("table lists " + std::to_string(c.listed) + " zeros but " +
                                 std::to_string(c.certified) + " are certified");
      }
      out << "verified count " << c.certified << '\n';
      return 0;
    }
    if (z_import->parsed()) {
      const ZeroTable t = load_zero_table(z_table, z_height > 0.0 ? std::optional<double>(z_height) : std::nullopt,
                                         std::optional<double>(z_precision));
      save_zero_table(t, z_out);
      write_sidecar_manifest(z_out, "zeros import",
                             {{"table", z_table}, {"height", z_height}, {"precision", z_precision}, {"out", z_out}});
      out << "imported " << t.size() << " zeros up to " << num(t.height()) << " -> " << z_out << '\n';
      return 0;
    }
    if (fn_list->parsed()) {
      for (const auto& b : builtin_catalog()) {
        out << b.name << '(' << b.params << ") defaults " << b.defaults << ": " << b.description << '\n';
      }
      return 0;
    }
    if (fn_describe->parsed()) {
      const TestFunction f = parse_function(fn_name);
      const HypothesisReport h = check_hypotheses(f);
      out << "function " << f.name << '\n' << "smoothness " << to_string(f.smoothness) << '\n';
      for (const auto& [k, v] : h.details) out << k << ": " << v << '\n';
      out << "covariance_admissible " << (h.covariance_admissible() ? "yes" : "no") << '\n';
      out << "normalized_admissible " << (h.normalized_admissible() ? "yes" : "no") << '\n';
      return 0;
    }
    if (selberg->parsed()) {
      const ComplexPoint s{s_sigma, s_tau};
      const double need = std::max(2.0 * std::abs(s_tau), 100.0);
      const ZeroTable z = s_zeros.empty() ? ensure_zero_table(need) : load_zero_table(s_zeros);
      const SelbergDecomposition d = selberg_decomposition(s, s_u, z);
      auto cx = [](std::complex<double> v) { return num(v.real()) + (v.imag() < 0 ? " - " : " + ") + num(std::abs(v.imag())) + "i"; };
      out << "A_u " << cx(d.a_u) << '\n'
          << "B_u " << cx(d.b_u) << '\n'
          << "C_u " << cx(d.c_u) << '\n'
          << "D_u " << cx(d.d_u) << '\n'
          << "sum " << cx(d.total()) << '\n'
          << "zeta'/zeta " << cx(d.reference_logderiv) << '\n'
          << "defect " << num(d.defect) << '\n'
          << "tail_bound " << num(d.b_u_tail_bound) << " (zeros to " << num(d.b_u_truncation_height) << ")\n";
      return 0;
    }
    if (variance->parsed()) {
      const TestFunction f = parse_function(v_fn);
      if (!(v_lambda > 0.0)) throw ConfigError("--lambda: must be positive");
      const HHalf h = h_half_inner(f, f);
      out << "sigma_t_sq " << num(sigma_t_sq(f, v_lambda)) << '\n';
      out << "h_half_sq " << (h.divergent ? std::string("inf") : num(h.value)) << '\n';
      out << "h_half_divergent " << (h.divergent ? "true" : "false") << '\n';
      return 0;
    }
    if (explicit_check->parsed()) {
      const ExperimentConfig c = explicit_flags.resolve();
      const auto rows = run_explicit_check(c);
      out << "t lambda u mean_abs_residual max_abs_residual envelope\n";
      for (const auto& r : rows) {
        out << num(r.t) << ' ' << num(r.lambda) << ' ' << num(r.u) << ' ' << num(r.mean_abs_residual) << ' '
            << num(r.max_abs_residual) << ' ' << num(r.envelope) << '\n';
      }
      return 0;
    }
    if (clt->parsed()) {
      const ExperimentConfig c = clt_flags.resolve();
      const CltResult r = run_clt(c);
      for (const auto& b : r.blocks) {
        out << b.function << " t=" << num(b.t) << " lambda=" << num(b.lambda) << ' ' << stats_line(b.stats) << '\n';
      }
      for (const auto& f : r.files) out << "wrote " << f.string() << '\n';
      return 0;
    }
    if (cov->parsed()) {
      const ExperimentConfig c = cov_flags.resolve();
      const CovarianceResult r = run_covariance(c);
      out << "t=" << num(r.t) << " lambda=" << num(r.lambda) << '\n';
      for (std::size_t i = 0; i < r.functions.size(); ++i) {
        out << r.functions[i] << ':';
        for (std::size_t j = 0; j < r.functions.size(); ++j)
          out << ' ' << num(r.empirical[i][j]) << '/' << num(r.theoretical[i][j]);
        out << '\n';
      }
      out << "frobenius_relative " << num(r.frobenius_relative) << '\n';
      return 0;
    }
    return 1;
  }
};

void collect_help(const CLI::App* app, const std::string& prefix, std::string& out) {
  out += app->help(prefix);
  out += '\n';
  const std::string path = prefix.empty() ? app->get_name() : prefix + " " + app->get_name();
  for (const CLI::App* sub : app->get_subcommands([](const CLI::App*) { return true; })) collect_help(sub, path, out);
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Commands cmd;
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    cmd.app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return cmd.app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return cmd.app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    cmd.app.exit(e, out, err);
    return 1;
  }
  try {
    return cmd.run(out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(e.error_class());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::bad_alloc&) {
    err << "error: out of memory\n";
    return 2;
  }
}

std::string full_help() {
  Commands cmd;
  std::string out;
  collect_help(&cmd.app, "", out);
  return out;
}

}  // namespace mesozeta::cli
