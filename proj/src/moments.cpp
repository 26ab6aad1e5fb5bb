#include "rmt/moments.hpp"

#include <cmath>

#include "rmt/errors.hpp"
#include "rmt/power.hpp"
#include "rmt/sampling.hpp"
#include "rmt/stats.hpp"

namespace rmt {

namespace {

constexpr int kLengthGuard = 16;        // raw enumeration guard
constexpr int kOmegaLengthGuard = 8;    // guard for Omega-based sums
constexpr double kItemGuard = 1e8;      // enumeration work guard

double int_pow(double x, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

void require_index(int value, int n, const char* what) {
  if (value < 0 || value >= n) {
    throw DomainError(std::string(what) + ": index " + std::to_string(value) +
                      " out of range [0, " + std::to_string(n) + ")");
  }
}

void require_trials(std::int64_t trials, const char* what) {
  if (trials < 1000) {
    throw ConfigError(std::string(what) + ": trials must be >= 1000, got " +
                      std::to_string(trials));
  }
}

// Advances an odometer over {0..n-1}^length in lexicographic order
// (rightmost digit fastest). Returns false after the last vector.
bool advance_odometer(IndexVector& digits, int n) {
  for (int pos = static_cast<int>(digits.size()) - 1; pos >= 0; --pos) {
    if (++digits[pos] < n) return true;
    digits[pos] = 0;
  }
  return false;
}

}  // namespace

DiagonalMatrixSpec::DiagonalMatrixSpec(Vector t) : taus(std::move(t)) {
  if (taus.size() < 1) throw DomainError("DiagonalMatrixSpec: need n >= 1 weights");
  for (Eigen::Index i = 0; i < taus.size(); ++i) {
    if (!std::isfinite(taus(i)) || taus(i) < 0.0) {
      throw DomainError("DiagonalMatrixSpec: weights must be finite and >= 0");
    }
  }
}

double DiagonalMatrixSpec::hs_norm() const {
  const double scale = taus.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return scale * std::sqrt((taus / scale).squaredNorm());
}

double entry_of_power(const Matrix& b, int k, int i, int j) {
  require_square(b, "entry_of_power");
  if (k < 1) throw DomainError("entry_of_power: k must be >= 1");
  const int n = static_cast<int>(b.rows());
  require_index(i, n, "entry_of_power");
  require_index(j, n, "entry_of_power");
  if (k == 1) return b(i, j);  // the single empty index vector
  const int length = k - 1;
  if (length > kLengthGuard || std::pow(n, length) > kItemGuard) {
    throw CapacityError("entry_of_power: n^(k-1) enumeration over guard");
  }
  IndexVector alpha(length, 0);
  double sum = 0.0;
  do {
    double prod = b(i, alpha[0]);
    for (int step = 1; step < length; ++step) prod *= b(alpha[step - 1], alpha[step]);
    prod *= b(alpha[length - 1], j);
    sum += prod;
  } while (advance_odometer(alpha, n));
  return sum;
}

std::vector<IndexVector> enumerate_even_multisets(int n, int length) {
  if (n < 1) throw DomainError("enumerate_even_multisets: n must be >= 1");
  if (length < 0) throw DomainError("enumerate_even_multisets: negative length");
  if (length % 2 != 0) return {};  // odd length forces an odd multiplicity
  if (length == 0) return {IndexVector{}};
  if (length > kLengthGuard || std::pow(n, length) > kItemGuard) {
    throw CapacityError("enumerate_even_multisets: enumeration over guard (length " +
                        std::to_string(length) + ", alphabet " + std::to_string(n) + ")");
  }
  std::vector<IndexVector> result;
  IndexVector alpha(length, 0);
  std::vector<int> counts(n);
  do {
    std::fill(counts.begin(), counts.end(), 0);
    for (const int a : alpha) ++counts[a];
    bool all_even = true;
    for (const int c : counts) {
      if (c % 2 != 0) {
        all_even = false;
        break;
      }
    }
    if (all_even) result.push_back(alpha);
  } while (advance_odometer(alpha, n));
  return result;
}

IndexVector pairing_map(const IndexVector& alpha) {
  std::vector<int> counts;
  for (const int a : alpha) {
    if (a < 0) throw DomainError("pairing_map: negative symbol");
    if (a >= static_cast<int>(counts.size())) counts.resize(a + 1, 0);
    ++counts[a];
  }
  for (const int c : counts) {
    if (c % 2 != 0) {
      throw DomainError("pairing_map: vector has an odd multiplicity (not in Omega)");
    }
  }
  std::vector<char> erased(alpha.size(), 0);
  IndexVector beta;
  beta.reserve(alpha.size() / 2);
  std::size_t first = 0;
  for (std::size_t step = 0; step < alpha.size() / 2; ++step) {
    while (erased[first]) ++first;
    const int symbol = alpha[first];
    erased[first] = 1;
    std::size_t partner = first + 1;
    while (erased[partner] || alpha[partner] != symbol) ++partner;
    erased[partner] = 1;
    beta.push_back(symbol);
  }
  return beta;
}

double w_product(const Matrix& w, int i, int j, const IndexVector& alpha, int m, int k) {
  require_square(w, "w_product");
  const int n = static_cast<int>(w.rows());
  require_index(i, n, "w_product");
  require_index(j, n, "w_product");
  if (m < 1 || k < 1) throw DomainError("w_product: m and k must be >= 1");
  if (static_cast<int>(alpha.size()) != m * (k - 1)) {
    throw DomainError("w_product: alpha length " + std::to_string(alpha.size()) +
                      " != m(k-1) = " + std::to_string(m * (k - 1)));
  }
  const int block = k - 1;
  double prod = 1.0;
  for (int ell = 0; ell < m; ++ell) {
    int prev = i;
    for (int step = 0; step < block; ++step) {
      const int a = alpha[ell * block + step];
      require_index(a, n, "w_product");
      prod *= w(prev, a);
      prev = a;
    }
    prod *= w(prev, j);
  }
  return prod;
}

double haar_projection_moment(int n, int p) {
  if (n < 1) throw DomainError("haar_projection_moment: n must be >= 1");
  if (p < 0) throw DomainError("haar_projection_moment: p must be >= 0");
  if (p % 2 != 0) return 0.0;  // odd moments vanish by sign symmetry
  if (p > 12) throw DomainError("haar_projection_moment: p must be <= 12");
  double value = 1.0;
  for (int i = 0; i < p / 2; ++i) {
    value *= static_cast<double>(2 * i + 1) / static_cast<double>(n + 2 * i);
  }
  return value;
}

MomentReport entry_moment_mc(const DiagonalMatrixSpec& t, int k, int m, int i, int j,
                             std::int64_t trials, RngStream& rng, bool symmetrize) {
  const int n = t.n();
  require_index(i, n, "entry_moment_mc");
  require_index(j, n, "entry_moment_mc");
  if (k < 1 || m < 1) throw DomainError("entry_moment_mc: k and m must be >= 1");
  require_trials(trials, "entry_moment_mc");

  const auto t_diag = t.taus.asDiagonal();
  BlockAccumulator acc(trials);
  for (std::int64_t trial = 0; trial < trials; ++trial) {
    Matrix w = sample_haar_orthogonal(n, rng);
    if (symmetrize) {
      // Signs are drawn after the Haar sample so the draw order is fixed.
      for (int row = 0; row < n; ++row) {
        if (rng.next_rademacher() < 0.0) w.row(row) = -w.row(row);
      }
    }
    const Matrix powered = matrix_power(t_diag * w, k) * t_diag;
    acc.add(int_pow(powered(i, j), m));
  }

  MomentReport report;
  report.estimate = acc.mean();
  report.std_error = acc.jackknife_std_error();
  report.trials = trials;
  report.bound_value = int_pow(t.taus(i), m) * int_pow(t.taus(j), m) *
                       std::pow(t.hs_norm(), m * (k - 1)) *
                       std::pow(static_cast<double>(n), -0.5 * k * m);
  report.empirical_constant =
      report.bound_value > 0.0 ? report.estimate / report.bound_value : 0.0;
  return report;
}

McEstimate symmetrized_moment_sum(const DiagonalMatrixSpec& t, int k, int m, int i,
                                  int j, std::int64_t trials, RngStream& rng) {
  const int n = t.n();
  require_index(i, n, "symmetrized_moment_sum");
  require_index(j, n, "symmetrized_moment_sum");
  if (k < 1) throw DomainError("symmetrized_moment_sum: k must be >= 1");
  if (m < 1 || m % 2 != 0) {
    throw DomainError("symmetrized_moment_sum: m must be a positive even integer");
  }
  const int length = m * (k - 1);
  if (length > kOmegaLengthGuard) {
    throw CapacityError("symmetrized_moment_sum: m(k-1) = " + std::to_string(length) +
                        " over the enumeration guard " +
                        std::to_string(kOmegaLengthGuard));
  }
  require_trials(trials, "symmetrized_moment_sum");

  const std::vector<IndexVector> omega = enumerate_even_multisets(n, length);
  std::vector<double> weights(omega.size());
  for (std::size_t a = 0; a < omega.size(); ++a) {
    double weight = 1.0;
    for (const int symbol : omega[a]) weight *= t.taus(symbol);
    weights[a] = weight;
  }
  const double entry_weight = int_pow(t.taus(i), m) * int_pow(t.taus(j), m);

  BlockAccumulator acc(trials);
  for (std::int64_t trial = 0; trial < trials; ++trial) {
    const Matrix w = sample_haar_orthogonal(n, rng);
    double sum = 0.0;
    for (std::size_t a = 0; a < omega.size(); ++a) {
      sum += weights[a] * w_product(w, i, j, omega[a], m, k);
    }
    acc.add(entry_weight * sum);
  }
  return {acc.mean(), acc.jackknife_std_error(), trials};
}

PerturbationScan diagonal_perturbation_scan(const DiagonalMatrixSpec& t, int i, int k,
                                            const std::vector<double>& s_grid,
                                            std::int64_t trials, RngStream& rng) {
  const int n = t.n();
  require_index(i, n, "diagonal_perturbation_scan");
  if (k < 1) throw DomainError("diagonal_perturbation_scan: k must be >= 1");
  const double tau_i = t.taus(i);
  if (!(tau_i > 0.0)) {
    throw DomainError("diagonal_perturbation_scan: tau_i must be positive");
  }
  if (s_grid.empty()) throw DomainError("diagonal_perturbation_scan: empty grid");
  for (const double s : s_grid) {
    if (!(s >= tau_i / 2.0 * (1.0 - 1e-12)) || !(s <= tau_i * (1.0 + 1e-12))) {
      throw DomainError("diagonal_perturbation_scan: grid value " + std::to_string(s) +
                        " outside [tau_i/2, tau_i]");
    }
  }
  require_trials(trials, "diagonal_perturbation_scan");

  std::vector<BlockAccumulator> accs(s_grid.size(), BlockAccumulator(trials));
  Vector perturbed = t.taus;
  for (std::int64_t trial = 0; trial < trials; ++trial) {
    const Matrix w = sample_haar_orthogonal(n, rng);  // shared across the grid
    for (std::size_t g = 0; g < s_grid.size(); ++g) {
      perturbed(i) = s_grid[g];
      const auto diag = perturbed.asDiagonal();
      const Matrix powered = matrix_power(diag * w, k) * diag;
      const double entry = powered(i, i);
      accs[g].add(entry * entry);
    }
  }

  PerturbationScan scan;
  scan.n = n;
  scan.k = k;
  scan.i = i;
  scan.tau_i = tau_i;
  scan.points.resize(s_grid.size());
  for (std::size_t g = 0; g < s_grid.size(); ++g) {
    scan.points[g] = {s_grid[g], accs[g].mean(), accs[g].jackknife_std_error()};
  }
  return scan;
}

double exceedance_fraction(const PerturbationScan& scan, double c) {
  if (scan.points.empty()) throw DomainError("exceedance_fraction: empty scan");
  const double threshold = c * std::pow(static_cast<double>(scan.n), -scan.k) *
                           int_pow(scan.tau_i, 2 * scan.k + 2);
  std::size_t exceed = 0;
  for (const auto& point : scan.points) {
    if (point.estimate >= threshold) ++exceed;
  }
  return static_cast<double>(exceed) / static_cast<double>(scan.points.size());
}

}  // namespace rmt
