#include "rmt/sampling.hpp"

#include <Eigen/QR>

namespace rmt {

EntryDistribution parse_entry_distribution(const std::string& name) {
  if (name == "gaussian") return EntryDistribution::gaussian;
  if (name == "rademacher") return EntryDistribution::rademacher;
  if (name == "uniform_unit_variance") return EntryDistribution::uniform_unit_variance;
  throw ConfigError("unknown entry distribution '" + name +
                    "' (expected gaussian, rademacher, or uniform_unit_variance)");
}

std::string entry_distribution_name(EntryDistribution dist) {
  switch (dist) {
    case EntryDistribution::gaussian:
      return "gaussian";
    case EntryDistribution::rademacher:
      return "rademacher";
    case EntryDistribution::uniform_unit_variance:
      return "uniform_unit_variance";
  }
  throw ConfigError("unknown entry distribution tag");
}

namespace {

void require_dimension(int n, const char* what) {
  if (n < 1) {
    throw DomainError(std::string(what) + ": dimension must be >= 1, got " +
                      std::to_string(n));
  }
}

}  // namespace

Matrix sample_gaussian_matrix(int n, RngStream& rng) {
  require_dimension(n, "sample_gaussian_matrix");
  Matrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.next_normal();
  return g;
}

Matrix sample_haar_orthogonal(int n, RngStream& rng) {
  require_dimension(n, "sample_haar_orthogonal");
  const Matrix g = sample_gaussian_matrix(n, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Vector r_diagonal = qr.matrixQR().diagonal();
  for (int j = 0; j < n; ++j) {
    if (r_diagonal(j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

Matrix sample_iid_matrix(int n, EntryDistribution dist, RngStream& rng) {
  require_dimension(n, "sample_iid_matrix");
  if (dist == EntryDistribution::gaussian) return sample_gaussian_matrix(n, rng);
  Matrix g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      g(i, j) = dist == EntryDistribution::rademacher
                    ? rng.next_rademacher()
                    : rng.next_uniform_unit_variance();
    }
  }
  return g;
}

}  // namespace rmt
