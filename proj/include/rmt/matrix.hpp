#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "rmt/errors.hpp"

namespace rmt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline bool all_finite(const Matrix& a) { return a.allFinite(); }

inline void require_square(const Matrix& a, const char* what) {
  if (a.rows() < 1 || a.rows() != a.cols()) {
    throw DomainError(std::string(what) + ": expected a square matrix with n >= 1, got " +
                      std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
}

inline void require_finite(const Matrix& a, const char* what) {
  if (!all_finite(a)) {
    throw DomainError(std::string(what) + ": matrix has non-finite entries");
  }
}

// Hilbert-Schmidt (Frobenius) norm, accumulated with scaling by the largest
// absolute entry so that inputs with entries near the top or bottom of the
// double range do not overflow/underflow the sum of squares.
inline double hs_norm(const Matrix& a) {
  const double scale = a.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  if (!std::isfinite(scale)) return scale;
  return scale * std::sqrt((a / scale).squaredNorm());
}

// Max-norm distance from orthogonality, ||Q^T Q - I||_max.
inline double orthogonality_defect(const Matrix& q) {
  const auto n = q.rows();
  return (q.transpose() * q - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
}

}  // namespace rmt
