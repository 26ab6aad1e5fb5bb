#include "rmt/power.hpp"

#include <cmath>

namespace rmt {

namespace {

void require_power(int k, const char* what) {
  if (k < 0) {
    throw DomainError(std::string(what) + ": power must be non-negative, got " +
                      std::to_string(k));
  }
}

void require_nonsingular(double sigma_min, const char* what) {
  if (!(sigma_min >= kSingularCutoff)) {
    throw SingularMatrixError(std::string(what) +
                              ": matrix is numerically singular (sigma_min=" +
                              std::to_string(sigma_min) + ")");
  }
}

// Spectrum of P = scale_pow_k * P_tilde where P_tilde is the rescaled k-th
// inverse power with spectral norm ~1 and log_scale = k * log(1/sigma_min).
PowerSpectrum spectrum_from_scaled_power(const Matrix& p_tilde, double log_scale,
                                         int n, int k, SpectrumMethod method) {
  double hs_t = hs_norm(p_tilde);
  const Vector sv = singular_values(p_tilde);
  const double spec_t = sv(0);
  // ||.||_HS >= ||.|| holds exactly in real arithmetic; the max() guards the
  // 1-ulp inversion possible when the two independently rounded computations
  // meet at a numerically rank-one matrix.
  hs_t = std::max(hs_t, spec_t);

  PowerSpectrum out;
  out.n = n;
  out.k = k;
  out.method = method;
  out.log_spec_inv = log_scale + std::log(spec_t);
  out.log_hs_inv = log_scale + std::log(hs_t);
  out.log_smin_power = -out.log_spec_inv;
  out.spec_inv = std::exp(out.log_spec_inv);
  out.hs_inv = std::exp(out.log_hs_inv);
  out.smin_power = std::exp(out.log_smin_power);
  return out;
}

// Spectrum directly from singular values (the k == 1 case needs no products).
PowerSpectrum spectrum_from_sigma(const Vector& sigma, SpectrumMethod method) {
  const auto n = sigma.size();
  const double smin = sigma(n - 1);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double ratio = smin / sigma(i);
    sum += ratio * ratio;
  }
  PowerSpectrum out;
  out.n = static_cast<int>(n);
  out.k = 1;
  out.method = method;
  out.smin_power = smin;
  out.spec_inv = 1.0 / smin;
  out.hs_inv = out.spec_inv * std::sqrt(sum);
  out.log_smin_power = std::log(smin);
  out.log_spec_inv = -out.log_smin_power;
  out.log_hs_inv = out.log_spec_inv + 0.5 * std::log(sum);
  return out;
}

}  // namespace

Matrix matrix_power(const Matrix& a, int k) {
  require_square(a, "matrix_power");
  require_power(k, "matrix_power");
  const auto n = a.rows();
  if (k == 0) return Matrix::Identity(n, n);
  Matrix result = a;
  for (int step = 1; step < k; ++step) result = result * a;
  return result;
}

Matrix inverse_from_svd(const SvdFactors& f) {
  const auto n = f.sigma.size();
  require_nonsingular(f.sigma(n - 1), "inverse_from_svd");
  return f.v * f.sigma.cwiseInverse().asDiagonal() * f.u.transpose();
}

Matrix inverse_power_from_svd(const SvdFactors& f, int k) {
  require_power(k, "inverse_power_from_svd");
  return matrix_power(inverse_from_svd(f), k);
}

Matrix factored_inverse_power(const Vector& sigma, const Matrix& q, int k) {
  if (k < 1) {
    throw DomainError("factored_inverse_power: power must be >= 1, got " +
                      std::to_string(k));
  }
  const auto n = sigma.size();
  if (n < 1 || q.rows() != n || q.cols() != n) {
    throw DomainError("factored_inverse_power: sigma and q dimensions disagree");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(sigma(i) > 0.0)) {
      throw DomainError("factored_inverse_power: sigma entries must be positive");
    }
    if (i > 0 && sigma(i) > sigma(i - 1)) {
      throw DomainError("factored_inverse_power: sigma must be non-increasing");
    }
  }
  if (orthogonality_defect(q) > 1e-10) {
    throw DomainError("factored_inverse_power: q is not orthogonal within 1e-10");
  }
  const Vector inv_sigma = sigma.cwiseInverse();
  if (k == 1) return Matrix(inv_sigma.asDiagonal());
  const Matrix m = inv_sigma.asDiagonal() * q;
  return matrix_power(m, k - 1) * inv_sigma.asDiagonal();
}

PowerSpectrum inverse_spectrum_from_sigma(const Vector& sigma, SpectrumMethod method) {
  require_nonsingular(sigma(sigma.size() - 1), "inverse_spectrum_from_sigma");
  return spectrum_from_sigma(sigma, method);
}

PowerSpectrum inverse_power_spectrum(const SvdFactors& f, int k) {
  if (k < 1) {
    throw DomainError("inverse_power_spectrum: power must be >= 1, got " +
                      std::to_string(k));
  }
  const auto n = f.sigma.size();
  const double smin = f.sigma(n - 1);
  require_nonsingular(smin, "inverse_power_spectrum");
  if (k == 1) return spectrum_from_sigma(f.sigma, SpectrumMethod::direct);

  // B_tilde = V diag(smin/sigma) U^T = smin * G^-1, spectral norm ~1.
  const Vector scaled = (smin * f.sigma.cwiseInverse().array()).matrix();
  const Matrix b_tilde = f.v * scaled.asDiagonal() * f.u.transpose();
  const Matrix p_tilde = matrix_power(b_tilde, k);
  const double log_scale = -static_cast<double>(k) * std::log(smin);
  return spectrum_from_scaled_power(p_tilde, log_scale, static_cast<int>(n), k,
                                    SpectrumMethod::direct);
}

PowerSpectrum factored_inverse_power_spectrum(const Vector& sigma, const Matrix& q,
                                              int k) {
  if (k < 1) {
    throw DomainError("factored_inverse_power_spectrum: power must be >= 1");
  }
  const auto n = sigma.size();
  const double smin = sigma(n - 1);
  require_nonsingular(smin, "factored_inverse_power_spectrum");
  if (k == 1) return spectrum_from_sigma(sigma, SpectrumMethod::factored);

  const Vector scaled = (smin * sigma.cwiseInverse().array()).matrix();
  const Matrix m = scaled.asDiagonal() * q;
  const Matrix p_tilde = matrix_power(m, k - 1) * scaled.asDiagonal();
  const double log_scale = -static_cast<double>(k) * std::log(smin);
  return spectrum_from_scaled_power(p_tilde, log_scale, static_cast<int>(n), k,
                                    SpectrumMethod::factored);
}

double smin_of_power(const Matrix& g, int k) {
  if (k == 1) {
    const Vector sigma = singular_values(g);
    require_nonsingular(sigma(sigma.size() - 1), "smin_of_power");
    return sigma(sigma.size() - 1);
  }
  return inverse_power_spectrum(svd(g), k).smin_power;
}

double hs_norm_inverse_power(const Matrix& g, int k) {
  if (k == 1) {
    const Vector sigma = singular_values(g);
    require_nonsingular(sigma(sigma.size() - 1), "hs_norm_inverse_power");
    return hs_inverse_from_sigma(sigma);
  }
  return inverse_power_spectrum(svd(g), k).hs_inv;
}

double spec_norm_inverse_power(const Matrix& g, int k) {
  if (k == 1) {
    const Vector sigma = singular_values(g);
    require_nonsingular(sigma(sigma.size() - 1), "spec_norm_inverse_power");
    return 1.0 / sigma(sigma.size() - 1);
  }
  return inverse_power_spectrum(svd(g), k).spec_inv;
}

double hs_inverse_from_sigma(const Vector& sigma) {
  const auto n = sigma.size();
  const double smin = sigma(n - 1);
  require_nonsingular(smin, "hs_inverse_from_sigma");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double ratio = smin / sigma(i);
    sum += ratio * ratio;
  }
  return std::sqrt(sum) / smin;
}

}  // namespace rmt
