#pragma once

#include "rmt/matrix.hpp"

namespace rmt {

// Singular value decomposition A = U diag(sigma) V^T of a square matrix.
//
// Contracts:
//   - sigma is non-increasing and non-negative (ties kept in the backend's
//     stable order, so factor output is deterministic for a fixed input);
//   - U, V orthogonal to within 1e-12 in the max norm;
//   - reconstruction ||U diag(sigma) V^T - A||_max <= 1e-10 * (1 + ||A||_max).
// Sign/ordering freedom in U and V is not pinned beyond determinism: only
// sigma and the reconstruction are guaranteed.
struct SvdFactors {
  Matrix u;
  Vector sigma;
  Matrix v;
};

// Full SVD via a backward-stable dense solver (LAPACK divide-and-conquer).
// Throws DomainError on non-square or non-finite input, or if the backend
// fails to converge.
SvdFactors svd(const Matrix& a);

// Singular values only (same backend, values-only mode); cheaper than svd()
// when the factors are not needed.
Vector singular_values(const Matrix& a);

// Condition number sigma_max / sigma_min; +infinity when sigma_min == 0
// (documented sentinel, not an error).
double condition_number(const Matrix& a);

}  // namespace rmt
