#include "rmt/tail.hpp"

#include <cmath>

#include "rmt/errors.hpp"
#include "rmt/parallel.hpp"

namespace rmt {

namespace {

constexpr std::int64_t kTrialBlockSize = 4096;

double pick_log_statistic(const PowerSpectrum& ps, TailStatistic stat) {
  switch (stat) {
    case TailStatistic::smin_power:
      return ps.log_smin_power;
    case TailStatistic::hs_inverse_power:
    case TailStatistic::hs_inverse:
      return ps.log_hs_inv;
    case TailStatistic::spec_inverse_power:
      return ps.log_spec_inv;
  }
  throw DomainError("unknown tail statistic tag");
}

struct TrialOutcome {
  double log_stat = 0.0;
  bool discarded = false;
};

TrialOutcome evaluate_trial(TailStatistic stat, int n, int k, EntryDistribution dist,
                            SampleRoute route, std::uint64_t seed, std::int64_t trial) {
  if (route == SampleRoute::direct) {
    RngStream rng = derive_stream(seed, static_cast<std::uint64_t>(trial));
    const Matrix g = sample_iid_matrix(n, dist, rng);
    if (k == 1) {
      const Vector sigma = singular_values(g);
      if (sigma(n - 1) < kSingularCutoff) return {0.0, true};
      return {pick_log_statistic(inverse_spectrum_from_sigma(sigma), stat), false};
    }
    const SvdFactors f = svd(g);
    if (f.sigma(n - 1) < kSingularCutoff) return {0.0, true};
    return {pick_log_statistic(inverse_power_spectrum(f, k), stat), false};
  }
  // Factored route: sigma from one Gaussian sample, Q an independent Haar
  // draw; stream ids 2*trial and 2*trial + 1 keep the two sources disjoint.
  RngStream rng_g = derive_stream(seed, 2 * static_cast<std::uint64_t>(trial));
  RngStream rng_q = derive_stream(seed, 2 * static_cast<std::uint64_t>(trial) + 1);
  const Matrix g = sample_iid_matrix(n, dist, rng_g);
  const Vector sigma = singular_values(g);
  if (sigma(n - 1) < kSingularCutoff) return {0.0, true};
  if (k == 1) {
    return {pick_log_statistic(
                inverse_spectrum_from_sigma(sigma, SpectrumMethod::factored), stat),
            false};
  }
  const Matrix q = sample_haar_orthogonal(n, rng_q);
  return {pick_log_statistic(factored_inverse_power_spectrum(sigma, q, k), stat),
          false};
}

}  // namespace

std::string tail_statistic_name(TailStatistic s) {
  switch (s) {
    case TailStatistic::smin_power:
      return "smin_power";
    case TailStatistic::hs_inverse_power:
      return "hs_inverse_power";
    case TailStatistic::spec_inverse_power:
      return "spec_inverse_power";
    case TailStatistic::hs_inverse:
      return "hs_inverse";
  }
  throw DomainError("unknown tail statistic tag");
}

TailStatistic parse_tail_statistic(const std::string& name) {
  if (name == "smin_power") return TailStatistic::smin_power;
  if (name == "hs_inverse_power") return TailStatistic::hs_inverse_power;
  if (name == "spec_inverse_power") return TailStatistic::spec_inverse_power;
  if (name == "hs_inverse") return TailStatistic::hs_inverse;
  throw ConfigError("unknown tail statistic '" + name + "'");
}

std::string tail_direction_name(TailDirection d) {
  return d == TailDirection::lower_smallball ? "lower_smallball" : "upper_tail";
}

TailCurve estimate_tail_probability(TailStatistic statistic, TailDirection direction,
                                    int n, int k, EntryDistribution entry_dist,
                                    std::vector<double> t_grid, std::int64_t trials,
                                    std::uint64_t seed, SampleRoute route) {
  if (n < 1) throw DomainError("estimate_tail_probability: n must be >= 1");
  if (k < 1) throw DomainError("estimate_tail_probability: k must be >= 1");
  if (trials < 1000) {
    throw ConfigError("estimate_tail_probability: trials must be >= 1000, got " +
                      std::to_string(trials));
  }
  if (t_grid.empty()) throw ConfigError("estimate_tail_probability: empty t_grid");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > 0.0)) {
      throw ConfigError("estimate_tail_probability: grid values must be positive");
    }
    if (i > 0 && !(t_grid[i] > t_grid[i - 1])) {
      throw ConfigError("estimate_tail_probability: t_grid must be strictly increasing");
    }
  }
  if (direction == TailDirection::lower_smallball) {
    if (statistic != TailStatistic::smin_power) {
      throw ConfigError(
          "estimate_tail_probability: lower_smallball events threshold smin_power only");
    }
    if (t_grid.back() > 1.0) {
      throw ConfigError(
          "estimate_tail_probability: mixed-direction grid (small-ball needs t <= 1)");
    }
  } else {
    if (statistic == TailStatistic::smin_power) {
      throw ConfigError(
          "estimate_tail_probability: upper_tail events threshold inverse norms only");
    }
    if (t_grid.front() < 1.0) {
      throw ConfigError(
          "estimate_tail_probability: mixed-direction grid (upper tail needs t >= 1)");
    }
  }
  if (statistic == TailStatistic::hs_inverse && k != 1) {
    throw ConfigError("estimate_tail_probability: hs_inverse is the k == 1 statistic");
  }

  const std::size_t grid_size = t_grid.size();
  std::vector<double> log_thresholds(grid_size);
  const double half_log_n =
      0.5 * std::log(static_cast<double>(n)) *
      (direction == TailDirection::lower_smallball ? -1.0 : 1.0);
  for (std::size_t i = 0; i < grid_size; ++i) {
    log_thresholds[i] = k * std::log(t_grid[i]) + half_log_n;
  }

  const std::int64_t blocks = block_count(trials, kTrialBlockSize);
  std::vector<std::int64_t> counts(static_cast<std::size_t>(blocks) * grid_size, 0);
  std::vector<std::int64_t> discards(blocks, 0);

  run_blocked(trials, kTrialBlockSize,
              [&](std::int64_t block, std::int64_t begin, std::int64_t end) {
                std::int64_t* block_counts = counts.data() + block * grid_size;
                for (std::int64_t trial = begin; trial < end; ++trial) {
                  const TrialOutcome outcome = evaluate_trial(
                      statistic, n, k, entry_dist, route, seed, trial);
                  if (outcome.discarded) {
                    ++discards[block];
                    continue;
                  }
                  for (std::size_t i = 0; i < grid_size; ++i) {
                    const bool event =
                        direction == TailDirection::lower_smallball
                            ? outcome.log_stat <= log_thresholds[i]
                            : outcome.log_stat >= log_thresholds[i];
                    block_counts[i] += event ? 1 : 0;
                  }
                }
              });

  TailCurve curve;
  curve.statistic = statistic;
  curve.direction = direction;
  curve.n = n;
  curve.k = k;
  curve.entry_dist = entry_dist;
  curve.t_grid = std::move(t_grid);
  curve.trials = trials;
  curve.seed = seed;
  curve.event_counts.assign(grid_size, 0);
  for (std::int64_t b = 0; b < blocks; ++b) {
    curve.discarded += discards[b];
    for (std::size_t i = 0; i < grid_size; ++i) {
      curve.event_counts[i] += counts[b * grid_size + i];
    }
  }
  curve.trials_used = trials - curve.discarded;
  if (curve.trials_used < 1) {
    throw DomainError("estimate_tail_probability: every trial was discarded");
  }
  curve.p_hat.resize(grid_size);
  curve.ci_low.resize(grid_size);
  curve.ci_high.resize(grid_size);
  for (std::size_t i = 0; i < grid_size; ++i) {
    curve.p_hat[i] = static_cast<double>(curve.event_counts[i]) /
                     static_cast<double>(curve.trials_used);
    const WilsonInterval ci =
        wilson_interval(curve.event_counts[i], curve.trials_used, kZ99);
    curve.ci_low[i] = ci.low;
    curve.ci_high[i] = ci.high;
  }
  return curve;
}

SlopeFit fit_log_slope(const TailCurve& curve) {
  std::vector<double> x, y, w;
  for (std::size_t i = 0; i < curve.t_grid.size(); ++i) {
    if (curve.event_counts[i] < 50) continue;  // interval too wide to weight
    const double half_width =
        0.5 * (std::log(curve.ci_high[i]) - std::log(curve.ci_low[i]));
    x.push_back(std::log(curve.t_grid[i]));
    y.push_back(std::log(curve.p_hat[i]));
    w.push_back(1.0 / (half_width * half_width));
  }
  if (x.size() < 3) {
    throw InsufficientDataError(
        "fit_log_slope: need >= 3 grid points with >= 50 events, have " +
        std::to_string(x.size()));
  }
  const LineFit fit = weighted_line_fit(x, y, w);
  SlopeFit out;
  out.slope = fit.slope;
  out.intercept = fit.intercept;
  out.std_error = fit.slope_std_error;
  out.r_squared = fit.r_squared;
  out.points_used = static_cast<int>(x.size());
  return out;
}

HsComparison hs_comparison_ratio(int n, int k, std::int64_t outer_trials,
                                 std::int64_t inner_trials, std::uint64_t seed) {
  if (n < 1) throw DomainError("hs_comparison_ratio: n must be >= 1");
  if (k < 1) throw DomainError("hs_comparison_ratio: k must be >= 1");
  if (outer_trials < 1) throw ConfigError("hs_comparison_ratio: outer_trials must be >= 1");
  if (inner_trials < 1000) {
    throw ConfigError("hs_comparison_ratio: inner_trials must be >= 1000");
  }

  HsComparison result;
  result.n = n;
  result.k = k;
  result.outer_trials = outer_trials;
  result.inner_trials = inner_trials;
  result.seed = seed;
  result.ratios.reserve(outer_trials);

  for (std::int64_t outer = 0; outer < outer_trials; ++outer) {
    RngStream rng_g = derive_stream(seed, 2 * static_cast<std::uint64_t>(outer));
    RngStream rng_q = derive_stream(seed, 2 * static_cast<std::uint64_t>(outer) + 1);
    const Matrix g = sample_gaussian_matrix(n, rng_g);
    const Vector sigma = singular_values(g);
    if (sigma(n - 1) < kSingularCutoff) {
      ++result.discarded;
      continue;
    }
    // log of n^(1-k) ||G^-1||_HS^(2k); the k == 1 case reduces to twice the
    // same log_hs_inv the inner loop produces, making the ratio exactly 1.
    const double log_hs1 =
        inverse_spectrum_from_sigma(sigma, SpectrumMethod::factored).log_hs_inv;
    const double log_denominator =
        (1.0 - k) * std::log(static_cast<double>(n)) + 2.0 * k * log_hs1;
    double ratio_sum = 0.0;
    for (std::int64_t inner = 0; inner < inner_trials; ++inner) {
      PowerSpectrum ps;
      if (k == 1) {
        ps = inverse_spectrum_from_sigma(sigma, SpectrumMethod::factored);
      } else {
        const Matrix q = sample_haar_orthogonal(n, rng_q);
        ps = factored_inverse_power_spectrum(sigma, q, k);
      }
      ratio_sum += std::exp(2.0 * ps.log_hs_inv - log_denominator);
    }
    result.ratios.push_back(ratio_sum / static_cast<double>(inner_trials));
  }
  return result;
}

}  // namespace rmt
