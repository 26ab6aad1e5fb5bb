#include "rmt/experiment.hpp"

#include <chrono>
#include <cinttypes>
#include <climits>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "rmt/density.hpp"
#include "rmt/errors.hpp"
#include "rmt/moments.hpp"
#include "rmt/power.hpp"
#include "rmt/rng.hpp"
#include "rmt/stats.hpp"
#include "rmt/svd.hpp"
#include "rmt/version.hpp"

namespace rmt {

namespace {

using nlohmann::json;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

int get_int(const json& v, const std::string& key) {
  if (!v.is_number_integer()) {
    throw ConfigError("config field '" + key + "' must be an integer");
  }
  const auto raw = v.get<std::int64_t>();
  if (raw < INT_MIN || raw > INT_MAX) {
    throw ConfigError("config field '" + key + "' out of range");
  }
  return static_cast<int>(raw);
}

std::int64_t get_count(const json& v, const std::string& key) {
  if (!v.is_number_integer()) {
    throw ConfigError("config field '" + key + "' must be an integer");
  }
  const auto raw = v.get<std::int64_t>();
  if (raw < 0) throw ConfigError("config field '" + key + "' must be >= 0");
  return raw;
}

std::uint64_t get_seed(const json& v, const std::string& key) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  throw ConfigError("config field '" + key + "' must be a non-negative integer");
}

std::vector<double> get_number_list(const json& v, const std::string& key) {
  if (!v.is_array()) {
    throw ConfigError("config field '" + key + "' must be an array of numbers");
  }
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& item : v) {
    if (!item.is_number()) {
      throw ConfigError("config field '" + key + "' must contain numbers only");
    }
    out.push_back(item.get<double>());
  }
  return out;
}

std::string get_string(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError("config field '" + key + "' must be a string");
  return v.get<std::string>();
}

bool get_bool(const json& v, const std::string& key) {
  if (!v.is_boolean()) throw ConfigError("config field '" + key + "' must be a boolean");
  return v.get<bool>();
}

// Keys every experiment accepts.
const std::set<std::string> kCommonKeys = {"experiment", "seed", "output_path",
                                          "rng_name"};

const std::set<std::string>& keys_for(ExperimentKind kind) {
  static const std::set<std::string> tail = {"n", "k", "t_grid", "trials",
                                            "entry_dist", "statistic"};
  static const std::set<std::string> smallball = {"n", "k", "t_grid", "trials",
                                                  "entry_dist", "statistic"};
  static const std::set<std::string> moments = {"n", "k", "m", "trials", "taus",
                                                "i", "j", "symmetrize"};
  static const std::set<std::string> identity = {"n", "k", "trials"};
  static const std::set<std::string> density = {"n", "trials"};
  static const std::set<std::string> hs_comparison = {"n", "k", "inner_trials",
                                                      "outer_trials"};
  static const std::set<std::string> perturbation = {"n",    "k",      "taus",
                                                     "i",    "s_grid", "trials"};
  switch (kind) {
    case ExperimentKind::tail:
      return tail;
    case ExperimentKind::smallball:
      return smallball;
    case ExperimentKind::moments:
      return moments;
    case ExperimentKind::identity:
      return identity;
    case ExperimentKind::density:
      return density;
    case ExperimentKind::hs_comparison:
      return hs_comparison;
    case ExperimentKind::perturbation_scan:
      return perturbation;
  }
  throw ConfigError("unknown experiment kind");
}

void require_field(bool present, const std::string& key) {
  if (!present) throw ConfigError("config field '" + key + "' is required");
}

// Resolved weight vector for moments/perturbation experiments.
Vector resolve_taus(const ExperimentConfig& config) {
  if (config.taus.empty()) {
    return Vector::Ones(config.n);
  }
  Vector taus(static_cast<Eigen::Index>(config.taus.size()));
  for (std::size_t idx = 0; idx < config.taus.size(); ++idx) {
    taus(static_cast<Eigen::Index>(idx)) = config.taus[idx];
  }
  return taus;
}

std::vector<double> resolve_s_grid(const ExperimentConfig& config) {
  if (!config.s_grid.empty()) return config.s_grid;
  const Vector taus = resolve_taus(config);
  const int i0 = config.i - 1;
  if (i0 < 0 || i0 >= taus.size()) {
    throw ConfigError("config field 'i' out of range 1.." +
                      std::to_string(taus.size()));
  }
  const double tau = taus(i0);
  std::vector<double> grid(16);
  for (int g = 0; g < 16; ++g) {
    grid[g] = tau / 2.0 + (tau / 2.0) * (static_cast<double>(g) / 15.0);
  }
  return grid;
}

json tail_payload(const TailCurve& curve) {
  json payload;
  payload["statistic"] = tail_statistic_name(curve.statistic);
  payload["direction"] = tail_direction_name(curve.direction);
  payload["t_grid"] = curve.t_grid;
  payload["p_hat"] = curve.p_hat;
  payload["ci_low"] = curve.ci_low;
  payload["ci_high"] = curve.ci_high;
  payload["event_counts"] = curve.event_counts;
  payload["trials"] = curve.trials;
  payload["trials_used"] = curve.trials_used;
  payload["discarded"] = curve.discarded;
  try {
    const SlopeFit fit = fit_log_slope(curve);
    payload["slope"] = fit.slope;
    payload["slope_stderr"] = fit.std_error;
    payload["slope_intercept"] = fit.intercept;
    payload["slope_r_squared"] = fit.r_squared;
    payload["slope_points_used"] = fit.points_used;
  } catch (const InsufficientDataError&) {
    // Fewer than 3 usable points: the curve is still a result, the fit is
    // simply absent from the payload.
  }
  return payload;
}

}  // namespace

std::string experiment_kind_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::tail:
      return "tail";
    case ExperimentKind::smallball:
      return "smallball";
    case ExperimentKind::moments:
      return "moments";
    case ExperimentKind::identity:
      return "identity";
    case ExperimentKind::density:
      return "density";
    case ExperimentKind::hs_comparison:
      return "hs_comparison";
    case ExperimentKind::perturbation_scan:
      return "perturbation_scan";
  }
  throw ConfigError("unknown experiment kind");
}

ExperimentKind parse_experiment_kind(const std::string& name) {
  if (name == "tail") return ExperimentKind::tail;
  if (name == "smallball") return ExperimentKind::smallball;
  if (name == "moments") return ExperimentKind::moments;
  if (name == "identity") return ExperimentKind::identity;
  if (name == "density") return ExperimentKind::density;
  if (name == "hs_comparison") return ExperimentKind::hs_comparison;
  if (name == "perturbation_scan") return ExperimentKind::perturbation_scan;
  throw ConfigError("unknown experiment '" + name + "'");
}

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  if (!j.contains("experiment")) {
    throw ConfigError("config field 'experiment' is required");
  }
  ExperimentConfig config;
  config.experiment = parse_experiment_kind(get_string(j["experiment"], "experiment"));
  const std::set<std::string>& applicable = keys_for(config.experiment);

  for (const auto& [key, value] : j.items()) {
    if (kCommonKeys.count(key) == 0 && applicable.count(key) == 0) {
      if (keys_for(ExperimentKind::tail).count(key) || key == "m" || key == "taus" ||
          key == "i" || key == "j" || key == "symmetrize" || key == "s_grid" ||
          key == "inner_trials" || key == "outer_trials") {
        throw ConfigError("config field '" + key + "' does not apply to experiment '" +
                          experiment_kind_name(config.experiment) + "'");
      }
      throw ConfigError("unknown config field '" + key + "'");
    }
    if (key == "experiment") continue;
    if (key == "seed") config.seed = get_seed(value, key);
    else if (key == "output_path") config.output_path = get_string(value, key);
    else if (key == "rng_name") config.rng_name = get_string(value, key);
    else if (key == "n") config.n = get_int(value, key);
    else if (key == "k") config.k = get_int(value, key);
    else if (key == "m") config.m = get_int(value, key);
    else if (key == "t_grid") config.t_grid = get_number_list(value, key);
    else if (key == "s_grid") config.s_grid = get_number_list(value, key);
    else if (key == "trials") config.trials = get_count(value, key);
    else if (key == "inner_trials") config.inner_trials = get_count(value, key);
    else if (key == "outer_trials") config.outer_trials = get_count(value, key);
    else if (key == "entry_dist")
      config.entry_dist = parse_entry_distribution(get_string(value, key));
    else if (key == "statistic")
      config.statistic = parse_tail_statistic(get_string(value, key));
    else if (key == "taus") config.taus = get_number_list(value, key);
    else if (key == "i") config.i = get_int(value, key);
    else if (key == "j") config.j = get_int(value, key);
    else if (key == "symmetrize") config.symmetrize = get_bool(value, key);
  }

  if (!config.rng_name.empty() && config.rng_name != kRngName) {
    throw ConfigError("config field 'rng_name' must be '" + std::string(kRngName) +
                      "' (the generator this build provides)");
  }
  config.rng_name = kRngName;

  if (!j.contains("seed")) throw ConfigError("config field 'seed' is required");

  switch (config.experiment) {
    case ExperimentKind::tail:
    case ExperimentKind::smallball:
      require_field(j.contains("n"), "n");
      require_field(j.contains("t_grid"), "t_grid");
      require_field(j.contains("trials"), "trials");
      if (config.experiment == ExperimentKind::smallball) {
        if (j.contains("statistic") && config.statistic != TailStatistic::smin_power) {
          throw ConfigError("smallball experiments threshold smin_power only");
        }
        config.statistic = TailStatistic::smin_power;
      }
      break;
    case ExperimentKind::moments:
      require_field(j.contains("n") || j.contains("taus"), "n (or taus)");
      require_field(j.contains("m"), "m");
      require_field(j.contains("trials"), "trials");
      break;
    case ExperimentKind::identity:
      require_field(j.contains("n"), "n");
      require_field(j.contains("trials"), "trials");
      break;
    case ExperimentKind::density:
      require_field(j.contains("n"), "n");
      require_field(j.contains("trials"), "trials");
      break;
    case ExperimentKind::hs_comparison:
      require_field(j.contains("n"), "n");
      require_field(j.contains("inner_trials"), "inner_trials");
      require_field(j.contains("outer_trials"), "outer_trials");
      break;
    case ExperimentKind::perturbation_scan:
      require_field(j.contains("n") || j.contains("taus"), "n (or taus)");
      require_field(j.contains("trials"), "trials");
      break;
  }

  // taus/n consistency for the kinds that take weights.
  if (!config.taus.empty()) {
    if (config.n == 0) config.n = static_cast<int>(config.taus.size());
    if (config.n != static_cast<int>(config.taus.size())) {
      throw ConfigError("config fields 'n' and 'taus' disagree on the dimension");
    }
  }
  return config;
}

json canonical_config_json(const ExperimentConfig& config) {
  json out;
  out["experiment"] = experiment_kind_name(config.experiment);
  out["seed"] = config.seed;
  out["rng_name"] = std::string(kRngName);
  out["output_path"] = config.output_path;
  const ExperimentKind kind = config.experiment;
  const auto uses = [&](const char* key) {
    return keys_for(kind).count(key) != 0;
  };
  if (uses("n")) out["n"] = config.n;
  if (uses("k")) out["k"] = config.k;
  if (uses("m")) out["m"] = config.m;
  if (uses("t_grid")) out["t_grid"] = config.t_grid;
  if (uses("s_grid")) out["s_grid"] = resolve_s_grid(config);
  if (uses("trials")) out["trials"] = config.trials;
  if (uses("inner_trials")) out["inner_trials"] = config.inner_trials;
  if (uses("outer_trials")) out["outer_trials"] = config.outer_trials;
  if (uses("entry_dist")) out["entry_dist"] = entry_distribution_name(config.entry_dist);
  if (uses("statistic")) out["statistic"] = tail_statistic_name(config.statistic);
  if (uses("taus")) {
    const Vector taus = resolve_taus(config);
    std::vector<double> flat(taus.data(), taus.data() + taus.size());
    out["taus"] = flat;
  }
  if (uses("i")) out["i"] = config.i;
  if (uses("j")) out["j"] = config.j;
  if (uses("symmetrize")) out["symmetrize"] = config.symmetrize;
  return out;
}

std::string config_fingerprint(const ExperimentConfig& config) {
  const std::string canonical = canonical_config_json(config).dump();
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, fnv1a64(canonical));
  return buf;
}

ResultRecord run_experiment(const ExperimentConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  ResultRecord record;
  record.config = config;
  record.fingerprint = config_fingerprint(config);
  record.version = kArtifactVersion;

  json payload;
  switch (config.experiment) {
    case ExperimentKind::tail:
    case ExperimentKind::smallball: {
      const bool smallball = config.experiment == ExperimentKind::smallball;
      const TailCurve curve = estimate_tail_probability(
          smallball ? TailStatistic::smin_power : config.statistic,
          smallball ? TailDirection::lower_smallball : TailDirection::upper_tail,
          config.n, config.k, config.entry_dist, config.t_grid, config.trials,
          config.seed);
      payload = tail_payload(curve);
      break;
    }
    case ExperimentKind::moments: {
      const DiagonalMatrixSpec spec{resolve_taus(config)};
      const int i0 = config.i - 1;
      const int j0 = config.j - 1;
      RngStream rng = derive_stream(config.seed, 0);
      const MomentReport report =
          entry_moment_mc(spec, config.k, config.m, i0, j0, config.trials, rng,
                          config.symmetrize);
      payload["estimate"] = report.estimate;
      payload["std_error"] = report.std_error;
      payload["trials"] = report.trials;
      payload["bound_value"] = report.bound_value;
      payload["empirical_constant"] = report.empirical_constant;
      payload["symmetrize"] = config.symmetrize;
      const bool can_pair = !config.symmetrize && config.m % 2 == 0 &&
                            config.m * (config.k - 1) <= 8;
      if (can_pair) {
        // Equal stream -> the same Haar samples -> a paired comparison.
        RngStream rng_paired = derive_stream(config.seed, 0);
        const McEstimate sym = symmetrized_moment_sum(spec, config.k, config.m, i0,
                                                      j0, config.trials, rng_paired);
        payload["symmetrized_sum"] = sym.value;
        payload["symmetrized_std_error"] = sym.std_error;
        payload["paired_gap"] = report.estimate - sym.value;
        payload["combined_std_error"] =
            std::sqrt(report.std_error * report.std_error +
                      sym.std_error * sym.std_error);
      }
      break;
    }
    case ExperimentKind::identity: {
      // Disjoint stream ids under one seed: 3t direct, 3t+1 / 3t+2 factored.
      std::vector<double> direct;
      std::vector<double> factored;
      direct.reserve(config.trials);
      factored.reserve(config.trials);
      std::int64_t direct_discarded = 0;
      std::int64_t factored_discarded = 0;
      for (std::int64_t trial = 0; trial < config.trials; ++trial) {
        {
          RngStream rng = derive_stream(config.seed, 3 * trial);
          const Matrix g = sample_gaussian_matrix(config.n, rng);
          if (config.k == 1) {
            const Vector sigma = singular_values(g);
            if (sigma(config.n - 1) < kSingularCutoff) {
              ++direct_discarded;
            } else {
              direct.push_back(inverse_spectrum_from_sigma(sigma).log_hs_inv);
            }
          } else {
            const SvdFactors f = svd(g);
            if (f.sigma(config.n - 1) < kSingularCutoff) {
              ++direct_discarded;
            } else {
              direct.push_back(inverse_power_spectrum(f, config.k).log_hs_inv);
            }
          }
        }
        {
          RngStream rng_g = derive_stream(config.seed, 3 * trial + 1);
          RngStream rng_q = derive_stream(config.seed, 3 * trial + 2);
          const Matrix g = sample_gaussian_matrix(config.n, rng_g);
          const Vector sigma = singular_values(g);
          if (sigma(config.n - 1) < kSingularCutoff) {
            ++factored_discarded;
          } else if (config.k == 1) {
            factored.push_back(
                inverse_spectrum_from_sigma(sigma, SpectrumMethod::factored)
                    .log_hs_inv);
          } else {
            const Matrix q = sample_haar_orthogonal(config.n, rng_q);
            factored.push_back(
                factored_inverse_power_spectrum(sigma, q, config.k).log_hs_inv);
          }
        }
      }
      const KsResult ks = ks_two_sample(direct, factored);
      payload["ks_statistic"] = ks.statistic;
      payload["ks_p_value"] = ks.p_value;
      payload["rejected_at_0.01"] = ks.p_value < 0.01;
      payload["trials"] = config.trials;
      payload["direct_discarded"] = direct_discarded;
      payload["factored_discarded"] = factored_discarded;
      break;
    }
    case ExperimentKind::density: {
      RngStream rng = derive_stream(config.seed, 0);
      const McEstimate c = normalizing_constant(config.n, config.trials, rng);
      payload["c_hat"] = c.value;
      payload["std_error"] = c.std_error;
      payload["relative_std_error"] = c.value != 0.0 ? c.std_error / c.value : 0.0;
      payload["trials"] = c.trials;
      break;
    }
    case ExperimentKind::hs_comparison: {
      const HsComparison hc = hs_comparison_ratio(
          config.n, config.k, config.outer_trials, config.inner_trials, config.seed);
      payload["ratios"] = hc.ratios;
      double max_ratio = 0.0;
      double sum = 0.0;
      for (const double r : hc.ratios) {
        max_ratio = std::max(max_ratio, r);
        sum += r;
      }
      payload["max_ratio"] = max_ratio;
      payload["mean_ratio"] = hc.ratios.empty() ? 0.0 : sum / hc.ratios.size();
      payload["discarded"] = hc.discarded;
      payload["outer_trials"] = hc.outer_trials;
      payload["inner_trials"] = hc.inner_trials;
      break;
    }
    case ExperimentKind::perturbation_scan: {
      const DiagonalMatrixSpec spec{resolve_taus(config)};
      const int i0 = config.i - 1;
      const std::vector<double> s_grid = resolve_s_grid(config);
      RngStream rng = derive_stream(config.seed, 0);
      const PerturbationScan scan =
          diagonal_perturbation_scan(spec, i0, config.k, s_grid, config.trials, rng);
      std::vector<double> estimates, errors, normalized;
      for (const auto& point : scan.points) {
        estimates.push_back(point.estimate);
        errors.push_back(point.std_error);
        normalized.push_back(point.estimate /
                             std::pow(point.s, 2.0 * config.k + 2.0));
      }
      payload["s_grid"] = s_grid;
      payload["estimates"] = estimates;
      payload["std_errors"] = errors;
      payload["normalized"] = normalized;
      payload["tau_i"] = scan.tau_i;
      payload["trials"] = config.trials;
      if (2 * config.k <= 12) {
        payload["leading_constant"] = haar_projection_moment(config.n, 2 * config.k);
      }
      break;
    }
  }

  record.payload = std::move(payload);
  record.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  return record;
}

json result_to_json(const ResultRecord& record) {
  json out;
  out["artifact_version"] = record.version;
  out["config_fingerprint"] = record.fingerprint;
  out["config"] = canonical_config_json(record.config);
  out["experiment"] = experiment_kind_name(record.config.experiment);
  out["results"] = record.payload;
  return out;
}

namespace {

// One CSV row; cells default to empty ("absent, not zero").
struct CsvRow {
  std::string cells[17];
  std::string join() const {
    std::string line;
    for (int c = 0; c < 17; ++c) {
      if (c > 0) line += ',';
      line += cells[c];
    }
    return line;
  }
};

enum CsvColumn {
  kColExperiment = 0,
  kColN,
  kColK,
  kColM,
  kColT,
  kColPHat,
  kColCiLow,
  kColCiHigh,
  kColTrials,
  kColSlope,
  kColSlopeStderr,
  kColEmpiricalConstant,
  kColSeed,
  kColRngName,
  kColVersion,
  kColEstimate,
  kColStdError,
};

CsvRow base_row(const ResultRecord& record) {
  CsvRow row;
  row.cells[kColExperiment] = experiment_kind_name(record.config.experiment);
  row.cells[kColSeed] = std::to_string(record.config.seed);
  row.cells[kColRngName] = record.config.rng_name.empty() ? std::string(kRngName)
                                                          : record.config.rng_name;
  row.cells[kColVersion] = record.version;
  row.cells[kColN] = std::to_string(record.config.n);
  return row;
}

}  // namespace

std::string result_to_csv(const ResultRecord& record) {
  std::string out =
      "experiment,n,k,m,t,p_hat,ci_low,ci_high,trials,slope,slope_stderr,"
      "empirical_constant,seed,rng_name,version,estimate,std_error\n";
  const json& p = record.payload;
  const ExperimentKind kind = record.config.experiment;

  if (kind == ExperimentKind::tail || kind == ExperimentKind::smallball) {
    const auto& grid = p.at("t_grid");
    const std::string slope = p.contains("slope") ? fmt17(p["slope"].get<double>()) : "";
    const std::string slope_se =
        p.contains("slope_stderr") ? fmt17(p["slope_stderr"].get<double>()) : "";
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
      CsvRow row = base_row(record);
      row.cells[kColK] = std::to_string(record.config.k);
      row.cells[kColT] = fmt17(grid[idx].get<double>());
      row.cells[kColPHat] = fmt17(p.at("p_hat")[idx].get<double>());
      row.cells[kColCiLow] = fmt17(p.at("ci_low")[idx].get<double>());
      row.cells[kColCiHigh] = fmt17(p.at("ci_high")[idx].get<double>());
      row.cells[kColTrials] = std::to_string(p.at("trials_used").get<std::int64_t>());
      row.cells[kColSlope] = slope;
      row.cells[kColSlopeStderr] = slope_se;
      out += row.join() + "\n";
    }
    return out;
  }
  if (kind == ExperimentKind::moments) {
    CsvRow row = base_row(record);
    row.cells[kColK] = std::to_string(record.config.k);
    row.cells[kColM] = std::to_string(record.config.m);
    row.cells[kColTrials] = std::to_string(p.at("trials").get<std::int64_t>());
    row.cells[kColEmpiricalConstant] =
        fmt17(p.at("empirical_constant").get<double>());
    row.cells[kColEstimate] = fmt17(p.at("estimate").get<double>());
    row.cells[kColStdError] = fmt17(p.at("std_error").get<double>());
    return out + row.join() + "\n";
  }
  if (kind == ExperimentKind::identity) {
    // Flat view: the KS statistic rides in estimate, its p-value in p_hat.
    CsvRow row = base_row(record);
    row.cells[kColK] = std::to_string(record.config.k);
    row.cells[kColTrials] = std::to_string(p.at("trials").get<std::int64_t>());
    row.cells[kColEstimate] = fmt17(p.at("ks_statistic").get<double>());
    row.cells[kColPHat] = fmt17(p.at("ks_p_value").get<double>());
    return out + row.join() + "\n";
  }
  if (kind == ExperimentKind::density) {
    CsvRow row = base_row(record);
    row.cells[kColTrials] = std::to_string(p.at("trials").get<std::int64_t>());
    row.cells[kColEstimate] = fmt17(p.at("c_hat").get<double>());
    row.cells[kColStdError] = fmt17(p.at("std_error").get<double>());
    return out + row.join() + "\n";
  }
  if (kind == ExperimentKind::hs_comparison) {
    // One row per outer trial; t carries the outer index.
    const auto& ratios = p.at("ratios");
    for (std::size_t idx = 0; idx < ratios.size(); ++idx) {
      CsvRow row = base_row(record);
      row.cells[kColK] = std::to_string(record.config.k);
      row.cells[kColT] = std::to_string(idx);
      row.cells[kColTrials] = std::to_string(record.config.inner_trials);
      row.cells[kColEstimate] = fmt17(ratios[idx].get<double>());
      out += row.join() + "\n";
    }
    return out;
  }
  // perturbation_scan: one row per grid point; t carries the s coordinate.
  const auto& grid = p.at("s_grid");
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    CsvRow row = base_row(record);
    row.cells[kColK] = std::to_string(record.config.k);
    row.cells[kColT] = fmt17(grid[idx].get<double>());
    row.cells[kColTrials] = std::to_string(p.at("trials").get<std::int64_t>());
    row.cells[kColEstimate] = fmt17(p.at("estimates")[idx].get<double>());
    row.cells[kColStdError] = fmt17(p.at("std_errors")[idx].get<double>());
    out += row.join() + "\n";
  }
  return out;
}

namespace {

std::string output_stem(const std::string& path) {
  for (const char* suffix : {".json", ".csv"}) {
    const std::size_t len = std::string(suffix).size();
    if (path.size() > len && path.compare(path.size() - len, len, suffix) == 0) {
      return path.substr(0, path.size() - len);
    }
  }
  return path;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream stream(path, std::ios::binary | std::ios::trunc);
  if (!stream) throw IoError("cannot open '" + path + "' for writing");
  stream << content;
  stream.flush();
  if (!stream) throw IoError("write to '" + path + "' failed");
}

}  // namespace

void write_result(const ResultRecord& record, const std::string& output_path,
                  bool overwrite) {
  if (output_path.empty()) {
    throw ConfigError("output_path is required to write results");
  }
  const std::string stem = output_stem(output_path);
  const std::string json_path = stem + ".json";
  const std::string csv_path = stem + ".csv";
  if (!overwrite) {
    for (const std::string& path : {json_path, csv_path}) {
      if (std::filesystem::exists(path)) {
        throw IoError("refusing to overwrite existing '" + path +
                      "' (pass the overwrite flag)");
      }
    }
  }
  write_file(json_path, result_to_json(record).dump(2) + "\n");
  write_file(csv_path, result_to_csv(record));
}

ResultRecord run_and_write(const ExperimentConfig& config, bool overwrite) {
  if (config.output_path.empty()) {
    throw ConfigError("config field 'output_path' is required to write results");
  }
  ResultRecord record = run_experiment(config);
  write_result(record, config.output_path, overwrite);
  return record;
}

}  // namespace rmt
