#pragma once

#include <cstdint>
#include <vector>

namespace rmt {

// Two-sided 99% normal quantile used for all Wilson intervals in the lab.
inline constexpr double kZ99 = 2.5758293035489004;

struct WilsonInterval {
  double low = 0.0;
  double high = 0.0;
};

// Wilson score interval for a binomial proportion: stable at extreme
// proportions (never collapses to a zero-width interval at p_hat in {0, 1}).
WilsonInterval wilson_interval(std::int64_t successes, std::int64_t trials, double z);

// Kolmogorov limiting tail Q(lambda) = 2 * sum_{j>=1} (-1)^(j-1) exp(-2 j^2 lambda^2),
// clamped to [0, 1]; Q(lambda <= 0) = 1.
double kolmogorov_tail(double lambda);

struct KsResult {
  double statistic = 0.0;  // sup-distance between empirical CDFs
  double p_value = 1.0;    // asymptotic Kolmogorov tail
};

// Two-sample Kolmogorov-Smirnov test (asymptotic p-value; samples here are
// always >= 10^4 so the limiting distribution is accurate). Ties are pooled.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// Streaming mean with a delete-one-block jackknife standard error. Values
// are grouped into consecutive fixed-size blocks (the block layout depends
// only on the expected trial count, never on worker scheduling), so the
// estimate and its error are bit-reproducible. The jackknife — rather than
// the plain formula — is used because several of the averaged quantities are
// high powers of sums and strongly skewed.
class BlockAccumulator {
 public:
  explicit BlockAccumulator(std::int64_t expected_trials);

  void add(double value);
  std::int64_t count() const { return total_count_; }
  double mean() const;
  double jackknife_std_error() const;

 private:
  std::int64_t block_size_;
  std::int64_t total_count_ = 0;
  double running_sum_ = 0.0;
  std::vector<double> block_sums_;
  std::vector<std::int64_t> block_counts_;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_std_error = 0.0;
  double r_squared = 0.0;
};

// Weighted least squares of y against x with per-point weights w (inverse
// variance). Requires >= 2 points and positive total weight.
LineFit weighted_line_fit(const std::vector<double>& x, const std::vector<double>& y,
                          const std::vector<double>& w);

}  // namespace rmt
