#pragma once

#include <cstdint>
#include <vector>

#include "rmt/matrix.hpp"
#include "rmt/rng.hpp"

namespace rmt {

// Index vector over the alphabet {0, ..., n-1}. The library is 0-based
// throughout; the CLI converts from the 1-based indices used in math
// notation at its boundary.
using IndexVector = std::vector<int>;

// Diagonal matrix T = diag(tau_0, ..., tau_{n-1}) with non-negative weights.
struct DiagonalMatrixSpec {
  Vector taus;

  explicit DiagonalMatrixSpec(Vector t);
  int n() const { return static_cast<int>(taus.size()); }
  double hs_norm() const;  // sqrt(sum tau_i^2)
};

// Monte-Carlo moment estimate of one matrix entry, with the bound it is
// checked against. bound_value is the structural right side
//   tau_i^m tau_j^m ||T||_HS^(m(k-1)) n^(-km/2)
// with constant 1, and empirical_constant = estimate / bound_value is the
// measured stand-in for the unspecified theoretical constant.
struct MomentReport {
  double estimate = 0.0;
  double std_error = 0.0;
  std::int64_t trials = 0;
  double bound_value = 0.0;
  double empirical_constant = 0.0;
};

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t trials = 0;
};

// (i,j) entry of B^k expanded as the sum over index vectors alpha in
// [n]^(k-1) of b_{i,alpha_1} b_{alpha_1,alpha_2} ... b_{alpha_{k-1},j};
// k == 1 contributes the single empty index vector, i.e. b_{ij}.
double entry_of_power(const Matrix& b, int k, int i, int j);

// All alpha in {0..n-1}^length in which every symbol occurs an even number
// of times, in lexicographic order. Odd length returns the empty list (the
// parity forces some odd multiplicity). Guards: length <= 16 and n^length
// <= 10^8, else CapacityError.
std::vector<IndexVector> enumerate_even_multisets(int n, int length);

// The erasure pairing: repeatedly take the current first component as the
// next beta symbol, erase it together with the lowest-indexed other
// component equal to it. Defined exactly on even-multiplicity vectors
// (DomainError otherwise) and satisfies prod tau_alpha = prod tau_beta^2 for
// every weight vector.
IndexVector pairing_map(const IndexVector& alpha);

// The m-block path product: for each of the m blocks of alpha (each of
// length k-1) the product w_{i,a_1} w_{a_1,a_2} ... w_{a_{k-1},j}; for k == 1
// the blocks are empty and the result is w_{ij}^m.
double w_product(const Matrix& w, int i, int j, const IndexVector& alpha, int m, int k);

// Exact even Haar moment E w_11^p = prod_{i=0}^{p/2-1} (2i+1)/(n+2i) of a
// single entry of a Haar orthogonal matrix; odd p returns 0 by symmetry.
// Precondition p <= 12.
double haar_projection_moment(int n, int p);

// Monte-Carlo estimate of E [((T W)^k T)_{ij}]^m over Haar W (jackknife
// standard error). With symmetrize set, each trial additionally multiplies W
// by an independent uniform diagonal sign matrix P (W -> P W). P W is Haar
// again, so no expectation changes; the extra signs make the sampled entry
// exactly symmetric under the flip of row i at k == 1, centering odd-moment
// estimates whose true value vanishes by sign invariance.
MomentReport entry_moment_mc(const DiagonalMatrixSpec& t, int k, int m, int i, int j,
                             std::int64_t trials, RngStream& rng,
                             bool symmetrize = false);

// The even-multiplicity reduction of the same moment:
//   tau_i^m tau_j^m * sum over alpha in Omega_m of (prod tau_alpha) E^ w_{i,j,alpha}
// with all E^ estimated on one shared pool of Haar samples (paired against
// entry_moment_mc when both run on an equal stream). Guards: m even,
// m(k-1) <= 8.
McEstimate symmetrized_moment_sum(const DiagonalMatrixSpec& t, int k, int m, int i,
                                  int j, std::int64_t trials, RngStream& rng);

struct PerturbationPoint {
  double s = 0.0;
  double estimate = 0.0;   // second moment of the (i,i) entry
  double std_error = 0.0;
};

struct PerturbationScan {
  int n = 0;
  int k = 1;
  int i = 0;
  double tau_i = 0.0;
  std::vector<PerturbationPoint> points;
};

// Replaces tau_i by each grid value s in [tau_i/2, tau_i] and estimates
// E [((T(i,s) W)^k T(i,s))_{ii}]^2 by Monte Carlo, sharing the Haar samples
// across the grid (common random numbers).
PerturbationScan diagonal_perturbation_scan(const DiagonalMatrixSpec& t, int i, int k,
                                            const std::vector<double>& s_grid,
                                            std::int64_t trials, RngStream& rng);

// Fraction of scan points whose estimate exceeds c * n^-k * tau_i^(2k+2).
double exceedance_fraction(const PerturbationScan& scan, double c);

}  // namespace rmt
