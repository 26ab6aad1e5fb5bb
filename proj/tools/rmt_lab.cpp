// Command-line driver for the tail-probability laboratory.
//
// Every estimator subcommand assembles a JSON config, funnels it through the
// same strict parser the `run` subcommand uses, executes, prints a summary,
// and (when --out is given) writes <stem>.json + <stem>.csv.

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rmt/errors.hpp"
#include "rmt/experiment.hpp"
#include "rmt/report.hpp"
#include "rmt/version.hpp"

namespace {

using nlohmann::json;

json parse_number_list(const std::string& text, const std::string& flag) {
  json out = json::array();
  std::stringstream stream(text);
  std::string token;
  while (std::getline(stream, token, ',')) {
    if (token.empty()) {
      throw rmt::ConfigError(flag + " has an empty element in '" + text + "'");
    }
    try {
      std::size_t used = 0;
      const double value = std::stod(token, &used);
      if (used != token.size()) throw std::invalid_argument(token);
      out.push_back(value);
    } catch (const std::exception&) {
      throw rmt::ConfigError(flag + " element '" + token + "' is not a number");
    }
  }
  if (out.empty()) throw rmt::ConfigError(flag + " must list at least one number");
  return out;
}

void print_point_table(const json& results) {
  const auto& t_grid = results.at("t_grid");
  const auto& p_hat = results.at("p_hat");
  const auto& ci_low = results.at("ci_low");
  const auto& ci_high = results.at("ci_high");
  const auto& events = results.at("event_counts");
  std::printf("  %12s %14s %28s %10s\n", "t", "p_hat", "99% CI", "events");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    std::printf("  %12g %14.6g [%12.6g, %12.6g] %10lld\n",
                t_grid[i].get<double>(), p_hat[i].get<double>(),
                ci_low[i].get<double>(), ci_high[i].get<double>(),
                static_cast<long long>(events[i].get<std::int64_t>()));
  }
  if (results.contains("slope")) {
    std::printf("  slope = %.6f +/- %.6f  (r^2 = %.4f, %d points)\n",
                results["slope"].get<double>(),
                results["slope_stderr"].get<double>(),
                results["slope_r_squared"].get<double>(),
                results["slope_points_used"].get<int>());
  } else {
    std::printf("  slope: not fitted (fewer than 3 grid points with >= 50 events)\n");
  }
  std::printf("  trials used = %lld, discarded = %lld\n",
              static_cast<long long>(results.at("trials_used").get<std::int64_t>()),
              static_cast<long long>(results.at("discarded").get<std::int64_t>()));
}

void print_summary(const rmt::ResultRecord& record) {
  const json& r = record.payload;
  std::printf("experiment: %s\n",
              rmt::experiment_kind_name(record.config.experiment).c_str());
  switch (record.config.experiment) {
    case rmt::ExperimentKind::tail:
    case rmt::ExperimentKind::smallball:
      print_point_table(r);
      break;
    case rmt::ExperimentKind::moments:
      std::printf("  estimate = %.10g +/- %.3g  (%lld trials)\n",
                  r.at("estimate").get<double>(), r.at("std_error").get<double>(),
                  static_cast<long long>(r.at("trials").get<std::int64_t>()));
      std::printf("  bound value = %.10g, empirical constant = %.6g\n",
                  r.at("bound_value").get<double>(),
                  r.at("empirical_constant").get<double>());
      if (r.contains("symmetrized_sum")) {
        std::printf("  symmetrized sum = %.10g +/- %.3g (paired gap %.3g, combined se %.3g)\n",
                    r["symmetrized_sum"].get<double>(),
                    r["symmetrized_std_error"].get<double>(),
                    r["paired_gap"].get<double>(),
                    r["combined_std_error"].get<double>());
      }
      break;
    case rmt::ExperimentKind::identity:
      std::printf("  KS statistic = %.6g, p-value = %.6g -> %s at the 1%% level\n",
                  r.at("ks_statistic").get<double>(), r.at("ks_p_value").get<double>(),
                  r.at("rejected_at_0.01").get<bool>() ? "REJECTED" : "consistent");
      break;
    case rmt::ExperimentKind::density:
      std::printf("  c_hat = %.10g +/- %.3g  (%lld trials)\n",
                  r.at("c_hat").get<double>(), r.at("std_error").get<double>(),
                  static_cast<long long>(r.at("trials").get<std::int64_t>()));
      break;
    case rmt::ExperimentKind::hs_comparison:
      std::printf("  max ratio = %.10g, mean ratio = %.10g (%zu outer trials kept, %lld discarded)\n",
                  r.at("max_ratio").get<double>(), r.at("mean_ratio").get<double>(),
                  r.at("ratios").size(),
                  static_cast<long long>(r.at("discarded").get<std::int64_t>()));
      break;
    case rmt::ExperimentKind::perturbation_scan: {
      const auto& grid = r.at("s_grid");
      const auto& est = r.at("estimates");
      const auto& err = r.at("std_errors");
      const auto& norm = r.at("normalized");
      std::printf("  %12s %14s %12s %14s\n", "s", "estimate", "std_error",
                  "est/s^(2k+2)");
      for (std::size_t i = 0; i < grid.size(); ++i) {
        std::printf("  %12.6g %14.6g %12.3g %14.6g\n", grid[i].get<double>(),
                    est[i].get<double>(), err[i].get<double>(),
                    norm[i].get<double>());
      }
      if (r.contains("leading_constant")) {
        std::printf("  leading constant E[w^2k] = %.10g\n",
                    r["leading_constant"].get<double>());
      }
      break;
    }
  }
  std::printf("fingerprint: %s\n", record.fingerprint.c_str());
  std::printf("wall time: %.2f s\n", record.wall_time_seconds);
}

// Runs a config assembled by a subcommand; writes files when out is set.
void execute(json config, const std::string& out, bool overwrite) {
  if (!out.empty()) config["output_path"] = out;
  const rmt::ExperimentConfig parsed = rmt::parse_config(config);
  if (parsed.output_path.empty()) {
    const rmt::ResultRecord record = rmt::run_experiment(parsed);
    print_summary(record);
    return;
  }
  const rmt::ResultRecord record = rmt::run_and_write(parsed, overwrite);
  print_summary(record);
  const std::string stem = [&] {
    std::string s = parsed.output_path;
    for (const char* suffix : {".json", ".csv"}) {
      const std::string suf(suffix);
      if (s.size() > suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0) {
        return s.substr(0, s.size() - suf.size());
      }
    }
    return s;
  }();
  std::printf("wrote %s.json and %s.csv\n", stem.c_str(), stem.c_str());
}

struct CommonOpts {
  std::string out;
  bool overwrite = false;
  std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, CommonOpts* opts) {
  cmd->add_option("--seed", opts->seed, "Base seed for the counter RNG")
      ->default_val("0");
  cmd->add_option("--out", opts->out,
                  "Output stem; writes <stem>.json and <stem>.csv");
  cmd->add_flag("--overwrite", opts->overwrite,
                "Allow replacing existing output files");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte-Carlo laboratory for tails of singular-value statistics "
               "of Gaussian matrix powers"};
  app.set_version_flag("--version", std::string(rmt::kArtifactVersion));
  app.require_subcommand(1);
  std::function<void()> action;

  // ---- estimate-tail ----
  {
    auto* cmd = app.add_subcommand(
        "estimate-tail", "Upper-tail curve of an inverse-power norm on a t-grid");
    auto opts = std::make_shared<CommonOpts>();
    auto n = std::make_shared<int>(0);
    auto k = std::make_shared<int>(1);
    auto t_grid = std::make_shared<std::string>();
    auto trials = std::make_shared<std::int64_t>(0);
    auto dist = std::make_shared<std::string>("gaussian");
    auto statistic = std::make_shared<std::string>("hs_inverse_power");
    cmd->add_option("--n", *n, "Matrix dimension")->required();
    cmd->add_option("--k", *k, "Power")->default_val("1");
    cmd->add_option("--t-grid", *t_grid, "Comma-separated thresholds, all >= 1")
        ->required();
    cmd->add_option("--trials", *trials, "Monte-Carlo trials (>= 1000)")->required();
    cmd->add_option("--dist", *dist,
                    "Entry distribution: gaussian | rademacher | uniform");
    cmd->add_option("--statistic", *statistic,
                    "hs_inverse_power | spec_inverse_power | hs_inverse");
    add_common(cmd, opts.get());
    cmd->callback([=] {
      json config;
      config["experiment"] = "tail";
      config["n"] = *n;
      config["k"] = *k;
      config["t_grid"] = parse_number_list(*t_grid, "--t-grid");
      config["trials"] = *trials;
      config["entry_dist"] = *dist;
      config["statistic"] = *statistic;
      config["seed"] = opts->seed;
      execute(config, opts->out, opts->overwrite);
    });
  }

  // ---- estimate-smallball ----
  {
    auto* cmd = app.add_subcommand(
        "estimate-smallball",
        "Small-ball curve of s_min(G^k) on a t-grid with t <= 1");
    auto opts = std::make_shared<CommonOpts>();
    auto n = std::make_shared<int>(0);
    auto k = std::make_shared<int>(1);
    auto t_grid = std::make_shared<std::string>();
    auto trials = std::make_shared<std::int64_t>(0);
    auto dist = std::make_shared<std::string>("gaussian");
    cmd->add_option("--n", *n, "Matrix dimension")->required();
    cmd->add_option("--k", *k, "Power")->default_val("1");
    cmd->add_option("--t-grid", *t_grid, "Comma-separated thresholds, all <= 1")
        ->required();
    cmd->add_option("--trials", *trials, "Monte-Carlo trials (>= 1000)")->required();
    cmd->add_option("--dist", *dist,
                    "Entry distribution: gaussian | rademacher | uniform");
    add_common(cmd, opts.get());
    cmd->callback([=] {
      json config;
      config["experiment"] = "smallball";
      config["n"] = *n;
      config["k"] = *k;
      config["t_grid"] = parse_number_list(*t_grid, "--t-grid");
      config["trials"] = *trials;
      config["entry_dist"] = *dist;
      config["seed"] = opts->seed;
      execute(config, opts->out, opts->overwrite);
    });
  }

  // ---- verify-moments ----
  {
    auto* cmd = app.add_subcommand(
        "verify-moments",
        "Monte-Carlo entry moment E[((TW)^k T)_ij^m] against its bound");
    auto opts = std::make_shared<CommonOpts>();
    auto n = std::make_shared<int>(0);
    auto k = std::make_shared<int>(1);
    auto m = std::make_shared<int>(0);
    auto trials = std::make_shared<std::int64_t>(0);
    auto taus = std::make_shared<std::string>();
    auto i = std::make_shared<int>(1);
    auto j = std::make_shared<int>(1);
    auto symmetrize = std::make_shared<bool>(false);
    cmd->add_option("--n", *n, "Dimension (all-ones weights); or use --taus");
    cmd->add_option("--k", *k, "Power")->default_val("1");
    cmd->add_option("--m", *m, "Moment order")->required();
    cmd->add_option("--trials", *trials, "Monte-Carlo trials")->required();
    cmd->add_option("--taus", *taus, "Comma-separated diagonal weights");
    cmd->add_option("--i", *i, "Row index, 1-based")->default_val("1");
    cmd->add_option("--j", *j, "Column index, 1-based")->default_val("1");
    cmd->add_flag("--symmetrize", *symmetrize,
                  "Average over random sign flips of the Haar factor");
    add_common(cmd, opts.get());
    cmd->callback([=] {
      json config;
      config["experiment"] = "moments";
      if (*n > 0 || taus->empty()) config["n"] = *n;
      if (!taus->empty()) config["taus"] = parse_number_list(*taus, "--taus");
      config["k"] = *k;
      config["m"] = *m;
      config["trials"] = *trials;
      config["i"] = *i;
      config["j"] = *j;
      if (*symmetrize) config["symmetrize"] = true;
      config["seed"] = opts->seed;
      execute(config, opts->out, opts->overwrite);
    });
  }

  // ---- verify-identity ----
  {
    auto* cmd = app.add_subcommand(
        "verify-identity",
        "KS test: direct ||G^-k||_HS samples vs the factored representation");
    auto opts = std::make_shared<CommonOpts>();
    auto n = std::make_shared<int>(0);
    auto k = std::make_shared<int>(2);
    auto trials = std::make_shared<std::int64_t>(0);
    cmd->add_option("--n", *n, "Matrix dimension")->required();
    cmd->add_option("--k", *k, "Power")->default_val("2");
    cmd->add_option("--trials", *trials, "Samples per route")->required();
    add_common(cmd, opts.get());
    cmd->callback([=] {
      json config;
      config["experiment"] = "identity";
      config["n"] = *n;
      config["k"] = *k;
      config["trials"] = *trials;
      config["seed"] = opts->seed;
      execute(config, opts->out, opts->overwrite);
    });
  }

  // ---- density-check ----
  {
    auto* cmd = app.add_subcommand(
        "density-check",
        "Importance-sampling estimate of the eigenvalue-density constant (n <= 3)");
    auto opts = std::make_shared<CommonOpts>();
    auto n = std::make_shared<int>(0);
    auto trials = std::make_shared<std::int64_t>(0);
    cmd->add_option("--n", *n, "Dimension, at most 3")->required();
    cmd->add_option("--trials", *trials, "Monte-Carlo trials")->required();
    add_common(cmd, opts.get());
    cmd->callback([=] {
      json config;
      config["experiment"] = "density";
      config["n"] = *n;
      config["trials"] = *trials;
      config["seed"] = opts->seed;
      execute(config, opts->out, opts->overwrite);
    });
  }

  // ---- hs-compare ----
  {
    auto* cmd = app.add_subcommand(
        "hs-compare",
        "Ratio of the factored HS second moment to n^(1-k) ||G^-1||_HS^(2k)");
    auto opts = std::make_shared<CommonOpts>();
    auto n = std::make_shared<int>(0);
    auto k = std::make_shared<int>(2);
    auto outer = std::make_shared<std::int64_t>(0);
    auto inner = std::make_shared<std::int64_t>(0);
    cmd->add_option("--n", *n, "Matrix dimension")->required();
    cmd->add_option("--k", *k, "Power")->default_val("2");
    cmd->add_option("--outer-trials", *outer, "Gaussian draws")->required();
    cmd->add_option("--inner-trials", *inner, "Haar draws per Gaussian")->required();
    add_common(cmd, opts.get());
    cmd->callback([=] {
      json config;
      config["experiment"] = "hs_comparison";
      config["n"] = *n;
      config["k"] = *k;
      config["outer_trials"] = *outer;
      config["inner_trials"] = *inner;
      config["seed"] = opts->seed;
      execute(config, opts->out, opts->overwrite);
    });
  }

  // ---- perturbation-scan ----
  {
    auto* cmd = app.add_subcommand(
        "perturbation-scan",
        "Second moment of the i-th diagonal entry as its weight is perturbed");
    auto opts = std::make_shared<CommonOpts>();
    auto n = std::make_shared<int>(0);
    auto k = std::make_shared<int>(1);
    auto trials = std::make_shared<std::int64_t>(0);
    auto taus = std::make_shared<std::string>();
    auto i = std::make_shared<int>(1);
    auto s_grid = std::make_shared<std::string>();
    cmd->add_option("--n", *n, "Dimension (all-ones weights); or use --taus");
    cmd->add_option("--k", *k, "Power")->default_val("1");
    cmd->add_option("--trials", *trials, "Monte-Carlo trials per grid point")
        ->required();
    cmd->add_option("--taus", *taus, "Comma-separated diagonal weights");
    cmd->add_option("--i", *i, "Perturbed index, 1-based")->default_val("1");
    cmd->add_option("--s-grid", *s_grid,
                    "Comma-separated weights in [tau_i/2, tau_i]; default 16 points");
    add_common(cmd, opts.get());
    cmd->callback([=] {
      json config;
      config["experiment"] = "perturbation_scan";
      if (*n > 0 || taus->empty()) config["n"] = *n;
      if (!taus->empty()) config["taus"] = parse_number_list(*taus, "--taus");
      config["k"] = *k;
      config["trials"] = *trials;
      config["i"] = *i;
      if (!s_grid->empty()) config["s_grid"] = parse_number_list(*s_grid, "--s-grid");
      config["seed"] = opts->seed;
      execute(config, opts->out, opts->overwrite);
    });
  }

  // ---- fit-slope ----
  {
    auto* cmd = app.add_subcommand(
        "fit-slope", "Weighted log-log slope fit of a stored tail/smallball record");
    auto in = std::make_shared<std::string>();
    cmd->add_option("--in", *in, "Path to a stored .json record")->required();
    cmd->callback([=] {
      const json record = rmt::load_result_record(*in);
      if (!record.contains("results") || !record.contains("experiment")) {
        throw rmt::MalformedRecordError("record lacks results/experiment fields");
      }
      const std::string kind = record["experiment"].get<std::string>();
      if (kind != "tail" && kind != "smallball") {
        throw rmt::MalformedRecordError(
            "slope fits apply to tail/smallball records, got '" + kind + "'");
      }
      const json& r = record["results"];
      rmt::TailCurve curve;
      try {
        curve.statistic = rmt::parse_tail_statistic(r.at("statistic").get<std::string>());
        curve.direction = kind == "smallball" ? rmt::TailDirection::lower_smallball
                                              : rmt::TailDirection::upper_tail;
        curve.t_grid = r.at("t_grid").get<std::vector<double>>();
        curve.p_hat = r.at("p_hat").get<std::vector<double>>();
        curve.ci_low = r.at("ci_low").get<std::vector<double>>();
        curve.ci_high = r.at("ci_high").get<std::vector<double>>();
        curve.event_counts = r.at("event_counts").get<std::vector<std::int64_t>>();
        curve.trials_used = r.at("trials_used").get<std::int64_t>();
      } catch (const json::exception& e) {
        throw rmt::MalformedRecordError(std::string("record results are incomplete: ") +
                                        e.what());
      }
      const rmt::SlopeFit fit = rmt::fit_log_slope(curve);
      std::printf("slope = %.10g\nstd_error = %.10g\nintercept = %.10g\n"
                  "r_squared = %.6f\npoints_used = %d\n",
                  fit.slope, fit.std_error, fit.intercept, fit.r_squared,
                  fit.points_used);
    });
  }

  // ---- plot ----
  {
    auto* cmd = app.add_subcommand(
        "plot", "Re-emit a stored record as csv, json, or a log-log svg plot");
    auto in = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto format = std::make_shared<std::string>("svg");
    auto overwrite = std::make_shared<bool>(false);
    cmd->add_option("--in", *in, "Path to a stored .json record")->required();
    cmd->add_option("--out", *out, "Output file")->required();
    cmd->add_option("--format", *format, "csv | json | svg (default svg)");
    cmd->add_flag("--overwrite", *overwrite, "Allow replacing an existing file");
    cmd->callback([=] {
      rmt::emit_report(*in, *format, *out, *overwrite);
      std::printf("wrote %s (%s)\n", out->c_str(), format->c_str());
    });
  }

  // ---- run ----
  {
    auto* cmd = app.add_subcommand("run", "Execute a JSON experiment config");
    auto config_path = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto overwrite = std::make_shared<bool>(false);
    cmd->add_option("--config", *config_path, "Path to a JSON config file")
        ->required();
    cmd->add_option("--out", *out, "Override the config's output_path");
    cmd->add_flag("--overwrite", *overwrite, "Allow replacing existing files");
    cmd->callback([=] {
      std::ifstream stream(*config_path, std::ios::binary);
      if (!stream) {
        throw rmt::IoError("cannot open config file '" + *config_path + "'");
      }
      std::ostringstream buffer;
      buffer << stream.rdbuf();
      json config = json::parse(buffer.str(), nullptr, /*allow_exceptions=*/false);
      if (config.is_discarded()) {
        throw rmt::MalformedRecordError("config file '" + *config_path +
                                        "' is not valid JSON");
      }
      execute(config, *out, *overwrite);
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);  // --help / --version: usage text, exit 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const rmt::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.exit_code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
