#include "rmt/svd.hpp"

#include <lapacke.h>

#include <cstdlib>
#include <limits>
#include <mutex>

namespace rmt {

namespace {

// The BLAS backend must not spawn its own threads: matrices here are small
// (n <= a few hundred), thread fan-out costs more than it saves, and keeping
// BLAS single-threaded removes any backend-side reduction-order freedom.
// Must run before the first LAPACK/BLAS call in the process.
void ensure_single_threaded_blas() {
  static std::once_flag once;
  std::call_once(once, [] {
    ::setenv("OPENBLAS_NUM_THREADS", "1", /*overwrite=*/0);
    ::setenv("OMP_NUM_THREADS", "1", /*overwrite=*/0);
  });
}

}  // namespace

SvdFactors svd(const Matrix& a) {
  ensure_single_threaded_blas();
  require_square(a, "svd");
  require_finite(a, "svd");
  const int n = static_cast<int>(a.rows());
  Matrix work = a;  // dgesdd destroys its input
  Matrix u(n, n);
  Matrix vt(n, n);
  Vector sigma(n);
  const int info =
      LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'A', n, n, work.data(), n, sigma.data(),
                     u.data(), n, vt.data(), n);
  if (info != 0) {
    throw DomainError("svd: backend failed (dgesdd info=" + std::to_string(info) + ")");
  }
  return SvdFactors{std::move(u), std::move(sigma), Matrix(vt.transpose())};
}

Vector singular_values(const Matrix& a) {
  ensure_single_threaded_blas();
  require_square(a, "singular_values");
  require_finite(a, "singular_values");
  const int n = static_cast<int>(a.rows());
  Matrix work = a;
  Vector sigma(n);
  const int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', n, n, work.data(), n,
                                  sigma.data(), nullptr, 1, nullptr, 1);
  if (info != 0) {
    throw DomainError("singular_values: backend failed (dgesdd info=" +
                      std::to_string(info) + ")");
  }
  return sigma;
}

double condition_number(const Matrix& a) {
  const Vector sigma = singular_values(a);
  const auto n = sigma.size();
  if (sigma(n - 1) == 0.0) return std::numeric_limits<double>::infinity();
  return sigma(0) / sigma(n - 1);
}

}  // namespace rmt
