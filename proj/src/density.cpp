#include "rmt/density.hpp"

#include <cmath>
#include <limits>

#include "rmt/errors.hpp"
#include "rmt/sampling.hpp"
#include "rmt/stats.hpp"
#include "rmt/svd.hpp"

namespace rmt {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kSearchCap = 200;

// Rate of the exponential reference density used by the importance-sampling
// estimator. Any r in (1/2, 1) works; r = 0.6 keeps the weight
// prod lambda_i^(1/2) exp((1/2 - r) lambda_i) bounded with mild variance.
constexpr double kReferenceRate = 0.6;

// Normalization integral N_n(r) of exp(-r sum lambda) * Vandermonde(lambda)
// over the ordered sector 0 <= lambda_n <= ... <= lambda_1 (gap substitution
// turns it into a product of Gamma integrals).
double reference_normalization(int n, double r) {
  switch (n) {
    case 1:
      return 1.0 / r;
    case 2:
      return 1.0 / (2.0 * r * r * r);
    case 3:
      return 1.0 / (4.0 * std::pow(r, 6));
    default:
      throw CapacityError("normalizing_constant: only n <= 3 is supported");
  }
}

}  // namespace

TailConstants::TailConstants(double szarek, double hs) {
  if (!std::isfinite(szarek) || !std::isfinite(hs)) {
    throw DomainError("TailConstants: constants must be finite");
  }
  // Floor at 1: both formulas using the constants are monotone, so a floor is
  // conservative, and calibration runs can legitimately measure values < 1.
  c_szarek = std::max(1.0, szarek);
  c_hs = std::max(1.0, hs);
}

double log_joint_density_unnormalized(const Vector& lambdas) {
  const auto n = lambdas.size();
  if (n < 1) throw DomainError("log_joint_density_unnormalized: empty tuple");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(lambdas(i))) {
      throw DomainError("log_joint_density_unnormalized: non-finite value");
    }
    if (lambdas(i) < 0.0) {
      throw DomainError("log_joint_density_unnormalized: negative eigenvalue");
    }
    if (i > 0 && lambdas(i) > lambdas(i - 1)) {
      throw DomainError(
          "log_joint_density_unnormalized: tuple must be sorted non-increasing "
          "(the density lives on the ordered sector only)");
    }
  }
  if (lambdas(n - 1) == 0.0) return kNegInf;
  for (Eigen::Index i = 1; i < n; ++i) {
    if (lambdas(i) == lambdas(i - 1)) return kNegInf;  // Vandermonde vanishes
  }
  double value = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    value += -0.5 * lambdas(i) - 0.5 * std::log(lambdas(i));
    for (Eigen::Index j = i + 1; j < n; ++j) {
      value += std::log(lambdas(i) - lambdas(j));
    }
  }
  return value;
}

McEstimate normalizing_constant(int n, std::int64_t mc_trials, RngStream& rng) {
  if (n < 1) throw DomainError("normalizing_constant: n must be >= 1");
  if (n > 3) throw CapacityError("normalizing_constant: only n <= 3 is supported");
  if (mc_trials < 1000) {
    throw ConfigError("normalizing_constant: mc_trials must be >= 1000");
  }
  const double r = kReferenceRate;
  const double log_ref_norm = std::log(reference_normalization(n, r));

  // c = E_true[q/rho~]: the Vandermonde parts of q and rho~ cancel exactly,
  // leaving weight = exp((1/2 - r) sum lambda + (1/2) sum log lambda) / N_n(r).
  BlockAccumulator acc(mc_trials);
  for (std::int64_t trial = 0; trial < mc_trials; ++trial) {
    const Matrix g = sample_gaussian_matrix(n, rng);
    const Vector sigma = singular_values(g);
    double log_weight = -log_ref_norm;
    for (int i = 0; i < n; ++i) {
      const double lambda = sigma(i) * sigma(i);
      if (lambda <= 0.0) {
        log_weight = kNegInf;  // boundary of the sector: zero weight
        break;
      }
      log_weight += (0.5 - r) * lambda + 0.5 * std::log(lambda);
    }
    acc.add(std::exp(log_weight));
  }
  return {acc.mean(), acc.jackknife_std_error(), mc_trials};
}

int compute_u(const Vector& a_prime, double t, const TailConstants& constants) {
  const auto len = a_prime.size();
  if (len < 1) throw DomainError("compute_u: a_prime must be non-empty");
  double inverse_sum = 0.0;
  for (Eigen::Index i = 0; i < len; ++i) {
    if (!(a_prime(i) > 0.0) || !std::isfinite(a_prime(i))) {
      throw DomainError("compute_u: a_prime entries must be positive and finite");
    }
    if (i > 0 && a_prime(i) >= a_prime(i - 1)) {
      // Strictly decreasing: at a tie both densities in the selector's
      // ratio vanish and the defining comparison is 0/0.
      throw DomainError("compute_u: a_prime must be strictly decreasing");
    }
    inverse_sum += 1.0 / a_prime(i);
  }
  if (!(t >= 1.0)) throw DomainError("compute_u: t must be >= 1");
  const double n = static_cast<double>(len + 1);
  const double membership_bound = 4.0 * constants.c_hs * constants.c_szarek * t * t * n;
  if (inverse_sum > membership_bound) {
    throw DomainError("compute_u: a_prime outside the admissible set (sum 1/a_i = " +
                      std::to_string(inverse_sum) + " > " +
                      std::to_string(membership_bound) + ")");
  }
  const double d = 16.0 * constants.c_hs * constants.c_hs *
                   std::pow(constants.c_szarek, 4) * t * t * n;

  Vector with_trial(len + 1);
  with_trial.head(len) = a_prime;
  const auto log_density_at = [&](double lambda) {
    with_trial(len) = lambda;
    return log_joint_density_unnormalized(with_trial);
  };
  const double log4 = std::log(4.0);
  for (int u = 0; u <= kSearchCap; ++u) {
    const double lambda_hi = std::pow(4.0, -u) / d;
    if (!(lambda_hi < a_prime(len - 1))) {
      // Cannot happen for admissible a_prime with constants >= 1; guards a
      // broken caller rather than silently evaluating an unsorted tuple.
      throw DomainError("compute_u: evaluation point not below a_{n-1}");
    }
    const double log_ratio =
        log_density_at(lambda_hi / 4.0) - log_density_at(lambda_hi);
    if (log_ratio <= log4) return u;
  }
  throw NonTerminationError("compute_u: no u <= 200 satisfied the ratio condition");
}

double paley_zygmund_lower_bound(double mean, double second_moment, double theta) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw DomainError("paley_zygmund_lower_bound: mean must be >= 0 and finite");
  }
  if (!(second_moment > 0.0) || !std::isfinite(second_moment)) {
    throw DomainError("paley_zygmund_lower_bound: second_moment must be positive");
  }
  if (!(theta >= 0.0 && theta <= 1.0)) {
    // theta == 1 degenerates to the trivial bound 0 and is allowed.
    throw DomainError("paley_zygmund_lower_bound: theta must be in [0, 1]");
  }
  if (second_moment < mean * mean * (1.0 - 1e-12)) {
    throw DomainError(
        "paley_zygmund_lower_bound: inconsistent moments (second_moment < mean^2)");
  }
  const double bound = (1.0 - theta) * (1.0 - theta) * mean * mean / second_moment;
  return std::clamp(bound, 0.0, 1.0);
}

}  // namespace rmt
