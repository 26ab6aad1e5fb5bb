#pragma once

#include <cstdint>
#include <vector>

#include "rmt/power.hpp"
#include "rmt/sampling.hpp"
#include "rmt/stats.hpp"

namespace rmt {

// Which scalar statistic of the sample matrix is thresholded.
enum class TailStatistic {
  smin_power,         // s_min(G^k)
  hs_inverse_power,   // ||G^-k||_HS
  spec_inverse_power, // ||G^-k||
  hs_inverse,         // ||G^-1||_HS (the k == 1 specialization kept as its own label)
};

// Event direction. Small-ball events are {s_min(G^k) <= t^k n^-1/2} with
// t <= 1; upper tails are {stat >= t^k n^1/2} with t >= 1.
enum class TailDirection { lower_smallball, upper_tail };

// How each trial's sample is produced: from a Gaussian matrix directly, or
// from the factored representation (independent sigma and Haar Q). The two
// routes are equidistributed; the factored route exists to test exactly that.
enum class SampleRoute { direct, factored };

std::string tail_statistic_name(TailStatistic s);
TailStatistic parse_tail_statistic(const std::string& name);
std::string tail_direction_name(TailDirection d);

// Empirical tail curve: one matrix sample per trial evaluates every grid
// threshold simultaneously (common random numbers), so p_hat is exactly
// monotone across the grid sample-by-sample.
struct TailCurve {
  TailStatistic statistic = TailStatistic::smin_power;
  TailDirection direction = TailDirection::lower_smallball;
  int n = 0;
  int k = 1;
  EntryDistribution entry_dist = EntryDistribution::gaussian;
  std::vector<double> t_grid;
  std::vector<double> p_hat;
  std::vector<double> ci_low;   // Wilson 99%
  std::vector<double> ci_high;  // Wilson 99%
  std::vector<std::int64_t> event_counts;  // integer counts; the deterministic core
  std::int64_t trials = 0;      // requested trials
  std::int64_t trials_used = 0; // trials - discarded (the p_hat denominator)
  std::int64_t discarded = 0;   // numerically singular samples, counted not used
  std::uint64_t seed = 0;
};

// Estimates P{event(t)} over the grid. Trial i uses stream_id = i (direct
// route) so results are independent of worker count and scheduling.
//
// Preconditions (ConfigError): trials >= 10^3; grid non-empty, strictly
// increasing; all t <= 1 for lower_smallball (whose statistic must be
// smin_power), all t >= 1 for upper_tail (whose statistic must be one of the
// inverse norms); hs_inverse requires k == 1.
TailCurve estimate_tail_probability(TailStatistic statistic, TailDirection direction,
                                    int n, int k, EntryDistribution entry_dist,
                                    std::vector<double> t_grid, std::int64_t trials,
                                    std::uint64_t seed,
                                    SampleRoute route = SampleRoute::direct);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;     // in log p = slope * log t + intercept
  double std_error = 0.0;
  double r_squared = 0.0;
  int points_used = 0;
};

// Weighted least squares of log p_hat against log t. Weights are inverse
// squared CI half-widths in log space; grid points with fewer than 50
// observed events are excluded (their intervals are too wide to weight
// sensibly). Throws InsufficientDataError below 3 usable points.
SlopeFit fit_log_slope(const TailCurve& curve);

struct HsComparison {
  int n = 0;
  int k = 1;
  std::vector<double> ratios;  // one per non-discarded outer trial
  std::int64_t outer_trials = 0;
  std::int64_t inner_trials = 0;
  std::int64_t discarded = 0;
  std::uint64_t seed = 0;
};

// For each outer Gaussian G: the Monte-Carlo mean over inner Haar draws Q of
// ||(Sigma^-1 Q)^(k-1) Sigma^-1||_HS^2, divided by n^(1-k) ||G^-1||_HS^(2k).
// The ratio is bounded by a k-dependent constant; for k == 1 it is 1 up to
// the rounding of an average of identical values.
HsComparison hs_comparison_ratio(int n, int k, std::int64_t outer_trials,
                                 std::int64_t inner_trials, std::uint64_t seed);

}  // namespace rmt
