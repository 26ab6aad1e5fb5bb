#pragma once

#include <string>

#include "rmt/matrix.hpp"
#include "rmt/rng.hpp"

namespace rmt {

// Entry law for i.i.d. matrix ensembles. Every tag has mean 0, variance 1.
enum class EntryDistribution {
  gaussian,               // standard normal
  rademacher,             // uniform on {-1, +1}
  uniform_unit_variance,  // continuous uniform on [-sqrt(3), sqrt(3)]
};

// Parse/format the distribution tag (used by config files and CLI flags).
// Unknown names throw ConfigError.
EntryDistribution parse_entry_distribution(const std::string& name);
std::string entry_distribution_name(EntryDistribution dist);

// n x n matrix of i.i.d. standard normals, filled row by row (row-major draw
// order is part of the reproducibility contract).
Matrix sample_gaussian_matrix(int n, RngStream& rng);

// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with each
// column of Q flipped to make the corresponding diagonal entry of R
// non-negative (a zero diagonal entry counts as +1). The sign correction is
// what makes the QR output exactly Haar rather than merely orthogonal.
Matrix sample_haar_orthogonal(int n, RngStream& rng);

// n x n matrix of i.i.d. draws from the given entry law, row-major order.
// The gaussian tag reproduces sample_gaussian_matrix exactly for an equal
// stream.
Matrix sample_iid_matrix(int n, EntryDistribution dist, RngStream& rng);

}  // namespace rmt
