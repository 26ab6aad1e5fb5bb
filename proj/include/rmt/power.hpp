#pragma once

#include "rmt/svd.hpp"

namespace rmt {

// Samples with smallest singular value below this are treated as numerically
// singular: they are a measure-zero event for the continuous ensembles, but
// letting them through would poison inverse powers with overflow.
inline constexpr double kSingularCutoff = 1e-280;

// How a spectrum was computed: from the matrix's own SVD (direct) or from the
// factored representation (Sigma^-1 Q)^(k-1) Sigma^-1 (factored).
enum class SpectrumMethod { direct, factored };

// The three inverse-power statistics of one sample, plus their logs.
//
// The log fields are the primary, overflow-free representation: for tiny
// sigma_min the plain values saturate to inf (hs_inv, spec_inv) or 0
// (smin_power), while the logs stay finite. Invariants on every sample:
//   hs_inv >= spec_inv > 0,  smin_power * spec_inv == 1 up to rounding.
struct PowerSpectrum {
  int n = 0;
  int k = 0;
  double smin_power = 0;  // s_min(G^k)
  double hs_inv = 0;      // ||G^-k||_HS
  double spec_inv = 0;    // ||G^-k|| (spectral norm)
  SpectrumMethod method = SpectrumMethod::direct;
  double log_smin_power = 0;
  double log_hs_inv = 0;
  double log_spec_inv = 0;
};

// Repeated left-to-right product A^k in 64-bit floats; k == 0 returns the
// identity (documented convention), k >= 1 multiplies k factors.
Matrix matrix_power(const Matrix& a, int k);

// V diag(1/sigma) U^T from precomputed factors. Throws SingularMatrixError
// if sigma_min is below the cutoff.
Matrix inverse_from_svd(const SvdFactors& f);

// (G^-1)^k as an explicit matrix, built from the SVD factors of G (G^k is
// never inverted directly: its condition number is kappa(G)^k, which loses
// all digits already at moderate k, while the factored route only pays
// kappa(G) once). Entries may overflow to inf for extreme spectra; use
// inverse_power_spectrum for an overflow-free summary.
Matrix inverse_power_from_svd(const SvdFactors& f, int k);

// (Sigma^-1 Q)^(k-1) Sigma^-1 with Sigma = diag(sigma). For k == 1 this is
// exactly diag(1/sigma) regardless of q. Preconditions: sigma positive and
// non-increasing, q orthogonal to within 1e-10, k >= 1.
Matrix factored_inverse_power(const Vector& sigma, const Matrix& q, int k);

// k == 1 inverse spectrum straight from singular values (no factor matrices
// or products needed): smin_power = sigma_min, spec_inv = 1/sigma_min,
// hs_inv = ||diag(1/sigma)||_HS accumulated scaled.
PowerSpectrum inverse_spectrum_from_sigma(const Vector& sigma,
                                          SpectrumMethod method = SpectrumMethod::direct);

// Full inverse-power summary from the SVD of G. All heavy arithmetic runs on
// a spectrum rescaled by sigma_min (so the working matrix has spectral norm
// 1) and the k * log(1/sigma_min) scale is carried separately, which is what
// keeps the log fields finite over the entire double range.
PowerSpectrum inverse_power_spectrum(const SvdFactors& f, int k);

// Same summary for the factored representation (Sigma^-1 Q)^(k-1) Sigma^-1.
PowerSpectrum factored_inverse_power_spectrum(const Vector& sigma, const Matrix& q, int k);

// s_min(G^k), computed as 1/||G^-k|| through the SVD of G.
double smin_of_power(const Matrix& g, int k);

// ||G^-k||_HS through the SVD of G.
double hs_norm_inverse_power(const Matrix& g, int k);

// ||G^-k|| (spectral norm) through the SVD of G.
double spec_norm_inverse_power(const Matrix& g, int k);

// ||G^-1||_HS from singular values alone: (1/s_min) * sqrt(sum (s_min/s_i)^2),
// accumulated scaled so the sum of squares cannot overflow.
double hs_inverse_from_sigma(const Vector& sigma);

}  // namespace rmt
