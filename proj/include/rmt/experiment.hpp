#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "rmt/sampling.hpp"
#include "rmt/tail.hpp"

namespace rmt {

enum class ExperimentKind {
  tail,              // upper-tail curve of an inverse norm
  smallball,         // small-ball curve of s_min(G^k)
  moments,           // entry moment + bound + symmetrized cross-check
  identity,          // direct vs factored equidistribution (KS test)
  density,           // normalizing constant of the eigenvalue density
  hs_comparison,     // factored HS second moment vs n^(1-k) ||G^-1||_HS^(2k)
  perturbation_scan, // diagonal perturbation second-moment scan
};

std::string experiment_kind_name(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string& name);

// One fully-specified run. The canonical serialization of this record (all
// defaults materialized, keys sorted) determines every byte of the output,
// and its hash is the config fingerprint.
//
// Indices i and j are 1-based in configs and on the CLI, matching the usual
// math notation; the library itself is 0-based and the conversion happens in
// run_experiment.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::tail;
  int n = 0;
  int k = 1;
  int m = 0;
  std::vector<double> t_grid;
  std::vector<double> s_grid;
  std::int64_t trials = 0;
  std::int64_t inner_trials = 0;
  std::int64_t outer_trials = 0;
  EntryDistribution entry_dist = EntryDistribution::gaussian;
  std::uint64_t seed = 0;
  std::string output_path;  // stem; .json/.csv are appended
  std::string rng_name;     // always kRngName; present as metadata
  TailStatistic statistic = TailStatistic::hs_inverse_power;  // tail kind only
  std::vector<double> taus;  // moments / perturbation_scan; empty = all ones
  int i = 1;                 // 1-based
  int j = 1;                 // 1-based
  bool symmetrize = false;   // moments only
};

// Strict parse: unknown keys, keys not applicable to the experiment kind,
// wrong types, and out-of-domain values are all ConfigError with the field
// named in the message.
ExperimentConfig parse_config(const nlohmann::json& j);

// Canonical form: every applicable field materialized (defaults resolved),
// keys sorted. Stable across runs, the fingerprint input.
nlohmann::json canonical_config_json(const ExperimentConfig& config);

// FNV-1a 64-bit hash of the canonical serialization, as 16 hex digits.
std::string config_fingerprint(const ExperimentConfig& config);

// A completed run: the canonical config, its fingerprint, and the numeric
// payload. Wall time is carried for console reporting only and is never
// serialized (result files must be bit-identical across reruns).
struct ResultRecord {
  ExperimentConfig config;
  std::string fingerprint;
  std::string version;
  nlohmann::json payload;
  double wall_time_seconds = 0.0;
};

// Runs the experiment described by the config. Pure compute: no I/O.
ResultRecord run_experiment(const ExperimentConfig& config);

// Full-fidelity JSON form of a record (version, fingerprint, config, results).
nlohmann::json result_to_json(const ResultRecord& record);

// Flat CSV form. Fixed column set, one row per grid point / scalar result;
// inapplicable cells are empty, not zero. Floats use 17 significant digits
// so the CSV -> double -> CSV round trip is exact.
std::string result_to_csv(const ResultRecord& record);

// Writes <stem>.json and <stem>.csv (a trailing .json/.csv on output_path is
// stripped to form the stem). Refuses to overwrite existing files unless
// overwrite is set (IoError).
void write_result(const ResultRecord& record, const std::string& output_path,
                  bool overwrite);

// Convenience: run, then write to config.output_path. Returns the record.
ResultRecord run_and_write(const ExperimentConfig& config, bool overwrite);

}  // namespace rmt
