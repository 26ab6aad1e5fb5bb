#pragma once

#include <cstdint>

#include "rmt/matrix.hpp"
#include "rmt/moments.hpp"
#include "rmt/rng.hpp"

namespace rmt {

// Empirical stand-ins for the two tail constants the theory leaves implicit:
// the small-ball constant (sup of P{s_min <= t n^-1/2} / t) and the inverse
// Hilbert-Schmidt tail constant (sup of P{||G^-1||_HS >= t sqrt(n)} * t).
// Both are measured by calibration experiments and floored at 1 (the
// admissible-set and dyadic-selector formulas below are monotone in them, so
// flooring is conservative).
struct TailConstants {
  double c_szarek = 1.0;
  double c_hs = 1.0;

  TailConstants(double szarek, double hs);
};

// Log of the unnormalized joint eigenvalue density of G G^T on the ordered
// sector (lambda non-increasing, non-negative):
//   -(1/2) sum lambda_i + sum_{i<j} log(lambda_i - lambda_j) - (1/2) sum log lambda_i.
// Entirely log-domain: never overflows for lambda in [1e-300, 1e300]^n.
// Ties or lambda_n == 0 give -infinity (the density vanishes there); an
// unsorted or negative tuple is a DomainError, never a silent sign flip —
// the Vandermonde factor is a density only on the ordered sector.
double log_joint_density_unnormalized(const Vector& lambdas);

// The normalizing constant c(n) of that density (restricted to n <= 3),
// estimated by importance sampling evaluated at sampled eigenvalues of
// G G^T: the estimator averages q(lambda)/rho~(lambda) over true eigenvalue
// samples, where q is an exactly-normalized reference density on the ordered
// sector whose Vandermonde factor cancels rho~'s (so eigenvalue ties cost no
// precision). Returns the estimate with a jackknife standard error.
McEstimate normalizing_constant(int n, std::int64_t mc_trials, RngStream& rng);

// The dyadic selector u(a'): the smallest non-negative integer u such that
//   rho(a', 4^-(u+1) / D) <= 4 * rho(a', 4^-u / D),
// where rho appends the trial value to the fixed coordinates a' and
// D = 16 c_hs^2 c_szarek^4 t^2 n (with n = len(a') + 1). The ratio is a
// difference of log densities, so the normalizing constant cancels.
//
// Preconditions: a' positive and strictly decreasing (at a tie both
// densities in the ratio vanish and the comparison is 0/0); t >= 1; a' in the
// admissible set, i.e. sum 1/a_i <= 4 c_hs c_szarek t^2 n. The search is
// capped at u = 200: exceeding the cap throws NonTerminationError, which
// signals a numerical problem because u is provably well defined.
int compute_u(const Vector& a_prime, double t, const TailConstants& constants);

// Paley-Zygmund lower bound (1-theta)^2 mean^2 / second_moment, clamped to
// [0, 1]. Moments with second_moment < mean^2 beyond 1e-12 relative slack
// are inconsistent (Cauchy-Schwarz) and throw DomainError.
double paley_zygmund_lower_bound(double mean, double second_moment, double theta);

}  // namespace rmt
