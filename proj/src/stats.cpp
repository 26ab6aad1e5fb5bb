#include "rmt/stats.hpp"

#include <algorithm>
#include <cmath>

#include "rmt/errors.hpp"

namespace rmt {

WilsonInterval wilson_interval(std::int64_t successes, std::int64_t trials, double z) {
  if (trials < 1 || successes < 0 || successes > trials) {
    throw DomainError("wilson_interval: need 0 <= successes <= trials, trials >= 1");
  }
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half =
      (z / denom) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

double kolmogorov_tail(double lambda) {
  if (lambda <= 0.0) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += sign * term;
    if (term < 1e-16) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) {
    throw DomainError("ks_two_sample: both samples must be non-empty");
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t ia = 0;
  std::size_t ib = 0;
  double d = 0.0;
  while (ia < a.size() || ib < b.size()) {
    const double x = (ia < a.size() && (ib >= b.size() || a[ia] <= b[ib])) ? a[ia]
                                                                           : b[ib];
    while (ia < a.size() && a[ia] == x) ++ia;
    while (ib < b.size() && b[ib] == x) ++ib;
    d = std::max(d, std::fabs(static_cast<double>(ia) / na -
                              static_cast<double>(ib) / nb));
  }
  const double effective = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_tail(effective * d)};
}

BlockAccumulator::BlockAccumulator(std::int64_t expected_trials)
    : block_size_(std::max<std::int64_t>(1, expected_trials / 256)) {}

void BlockAccumulator::add(double value) {
  const std::int64_t block = total_count_ / block_size_;
  if (static_cast<std::int64_t>(block_sums_.size()) <= block) {
    block_sums_.push_back(0.0);
    block_counts_.push_back(0);
  }
  block_sums_[block] += value;
  block_counts_[block] += 1;
  running_sum_ += value;
  ++total_count_;
}

double BlockAccumulator::mean() const {
  if (total_count_ == 0) throw DomainError("BlockAccumulator: mean of no data");
  return running_sum_ / static_cast<double>(total_count_);
}

double BlockAccumulator::jackknife_std_error() const {
  const std::size_t blocks = block_sums_.size();
  if (blocks < 2) return 0.0;
  const double b = static_cast<double>(blocks);
  std::vector<double> leave_out(blocks);
  double pseudo_mean = 0.0;
  for (std::size_t i = 0; i < blocks; ++i) {
    leave_out[i] = (running_sum_ - block_sums_[i]) /
                   static_cast<double>(total_count_ - block_counts_[i]);
    pseudo_mean += leave_out[i];
  }
  pseudo_mean /= b;
  double ss = 0.0;
  for (std::size_t i = 0; i < blocks; ++i) {
    const double d = leave_out[i] - pseudo_mean;
    ss += d * d;
  }
  return std::sqrt((b - 1.0) / b * ss);
}

LineFit weighted_line_fit(const std::vector<double>& x, const std::vector<double>& y,
                          const std::vector<double>& w) {
  if (x.size() != y.size() || x.size() != w.size()) {
    throw DomainError("weighted_line_fit: input lengths disagree");
  }
  if (x.size() < 2) {
    throw InsufficientDataError("weighted_line_fit: need at least 2 points");
  }
  double sw = 0.0, swx = 0.0, swy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(w[i] > 0.0)) throw DomainError("weighted_line_fit: weights must be positive");
    sw += w[i];
    swx += w[i] * x[i];
    swy += w[i] * y[i];
  }
  const double xbar = swx / sw;
  const double ybar = swy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - xbar;
    sxx += w[i] * dx * dx;
    sxy += w[i] * dx * (y[i] - ybar);
  }
  if (!(sxx > 0.0)) {
    throw InsufficientDataError("weighted_line_fit: x values are degenerate");
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  // Weights are inverse variances, so Var(slope) = 1 / sum w dx^2.
  fit.slope_std_error = std::sqrt(1.0 / sxx);
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double fitted = fit.intercept + fit.slope * x[i];
    ss_res += w[i] * (y[i] - fitted) * (y[i] - fitted);
    ss_tot += w[i] * (y[i] - ybar) * (y[i] - ybar);
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

}  // namespace rmt
