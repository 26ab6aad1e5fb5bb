#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <vector>

#include "rmt/errors.hpp"
#include "rmt/matrix.hpp"
#include "rmt/moments.hpp"
#include "rmt/power.hpp"
#include "rmt/rng.hpp"
#include "rmt/sampling.hpp"

using rmt::DiagonalMatrixSpec;
using rmt::IndexVector;
using rmt::Matrix;
using rmt::RngStream;
using rmt::Vector;

namespace {

Vector make_taus(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (const double x : values) v(i++) = x;
  return v;
}

}  // namespace

TEST_CASE("entry_of_power hand values and matrix oracle") {
  Matrix b(2, 2);
  b << 1.0, 2.0, 3.0, 4.0;
  CHECK(rmt::entry_of_power(b, 1, 0, 1) == 2.0);
  CHECK(rmt::entry_of_power(b, 2, 0, 0) == doctest::Approx(7.0).epsilon(1e-15));
  CHECK(rmt::entry_of_power(b, 2, 1, 1) == doctest::Approx(22.0).epsilon(1e-15));

  RngStream rng(1u, 0u);
  const Matrix g = rmt::sample_gaussian_matrix(5, rng);
  for (int k = 1; k <= 4; ++k) {
    const Matrix gk = rmt::matrix_power(g, k);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) {
        CHECK(rmt::entry_of_power(g, k, i, j) ==
              doctest::Approx(gk(i, j)).epsilon(1e-10));
      }
  }
}

TEST_CASE("entry_of_power guards its enumeration size") {
  const Matrix big = Matrix::Identity(40, 40);
  // 40^5 = 1.024e8 > 1e8 while 40^4 stays under the guard.
  CHECK_NOTHROW(rmt::entry_of_power(big, 5, 0, 0));
  CHECK_THROWS_AS(rmt::entry_of_power(big, 6, 0, 0), rmt::CapacityError);
  CHECK_THROWS_AS(rmt::entry_of_power(big, 0, 0, 0), rmt::DomainError);
}

TEST_CASE("even-multiset enumeration: order, counts, and edge cases") {
  {
    const auto omega = rmt::enumerate_even_multisets(2, 2);
    REQUIRE(omega.size() == 2);
    CHECK(omega[0] == IndexVector{0, 0});
    CHECK(omega[1] == IndexVector{1, 1});
  }
  {
    // All length-4 words over {0,1} with even multiplicities, lexicographic.
    const auto omega = rmt::enumerate_even_multisets(2, 4);
    REQUIRE(omega.size() == 8);
    const std::vector<IndexVector> expected = {
        {0, 0, 0, 0}, {0, 0, 1, 1}, {0, 1, 0, 1}, {0, 1, 1, 0},
        {1, 0, 0, 1}, {1, 0, 1, 0}, {1, 1, 0, 0}, {1, 1, 1, 1}};
    for (std::size_t i = 0; i < expected.size(); ++i) CHECK(omega[i] == expected[i]);
  }
  // Counting oracle for n = 3, length 4: 3 words of shape aaaa plus
  // 3 * (4 choose 2) = 18 words with two symbols twice each.
  CHECK(rmt::enumerate_even_multisets(3, 4).size() == 21);

  // Odd length: parity forces an odd multiplicity somewhere.
  CHECK(rmt::enumerate_even_multisets(3, 3).empty());
  CHECK(rmt::enumerate_even_multisets(5, 1).empty());

  // Length zero: exactly the empty vector.
  const auto trivial = rmt::enumerate_even_multisets(4, 0);
  REQUIRE(trivial.size() == 1);
  CHECK(trivial[0].empty());

  CHECK_THROWS_AS(rmt::enumerate_even_multisets(2, 18), rmt::CapacityError);
  CHECK_THROWS_AS(rmt::enumerate_even_multisets(100, 8), rmt::CapacityError);
}

TEST_CASE("pairing map hand values") {
  CHECK(rmt::pairing_map({0, 0}) == IndexVector{0});
  CHECK(rmt::pairing_map({1, 1}) == IndexVector{1});
  CHECK(rmt::pairing_map({0, 1, 1, 0}) == IndexVector{0, 1});
  CHECK(rmt::pairing_map({0, 1, 0, 1}) == IndexVector{0, 1});
  CHECK(rmt::pairing_map({2, 2, 2, 2}) == IndexVector{2, 2});
  CHECK(rmt::pairing_map({}).empty());
  CHECK_THROWS_AS(rmt::pairing_map({0, 1}), rmt::DomainError);
  CHECK_THROWS_AS(rmt::pairing_map({0, 0, 1}), rmt::DomainError);
}

TEST_CASE("pairing map preserves the weight product exactly") {
  // Integer weights make prod tau_alpha = prod tau_beta^2 an exact integer
  // identity: every alpha in Omega must satisfy it with zero failures.
  const std::int64_t taus[4] = {1, 2, 3, 4};
  for (const int length : {2, 4, 6}) {
    const auto omega = rmt::enumerate_even_multisets(4, length);
    for (const auto& alpha : omega) {
      std::int64_t lhs = 1;
      for (const int a : alpha) lhs *= taus[a];
      const IndexVector beta = rmt::pairing_map(alpha);
      REQUIRE(static_cast<int>(beta.size()) == length / 2);
      std::int64_t rhs = 1;
      for (const int b : beta) rhs *= taus[b] * taus[b];
      CHECK(lhs == rhs);
    }
  }
}

TEST_CASE("collapse identity: summing squared weights over all beta") {
  // sum over beta in [n]^L of prod tau_beta^2 = (sum tau^2)^L, exactly in
  // integer arithmetic.
  const std::int64_t taus[3] = {1, 2, 3};
  const int length = 3;
  std::int64_t total = 0;
  for (int b0 = 0; b0 < 3; ++b0)
    for (int b1 = 0; b1 < 3; ++b1)
      for (int b2 = 0; b2 < 3; ++b2) {
        std::int64_t term = 1;
        for (const int b : {b0, b1, b2}) term *= taus[b] * taus[b];
        total += term;
      }
  std::int64_t expected = 1;
  for (int r = 0; r < length; ++r) expected *= (1 + 4 + 9);
  CHECK(total == expected);  // 14^3 = 2744
}

TEST_CASE("w_product unrolls to the expected scalar products") {
  Matrix w(3, 3);
  w << 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9;

  // k = 1: empty blocks, so the product is w_ij^m.
  CHECK(rmt::w_product(w, 0, 2, {}, 3, 1) ==
        doctest::Approx(std::pow(0.3, 3)).epsilon(1e-15));

  // k = 2, m = 2: two blocks of length 1.
  const double expected = (w(0, 1) * w(1, 2)) * (w(0, 2) * w(2, 2));
  CHECK(rmt::w_product(w, 0, 2, {1, 2}, 2, 2) ==
        doctest::Approx(expected).epsilon(1e-15));

  // k = 3, m = 1: one block of length 2.
  const double expected3 = w(1, 0) * w(0, 2) * w(2, 1);
  CHECK(rmt::w_product(w, 1, 1, {0, 2}, 1, 3) ==
        doctest::Approx(expected3).epsilon(1e-15));

  CHECK_THROWS_AS(rmt::w_product(w, 0, 0, {1}, 2, 2), rmt::DomainError);  // wrong length
  CHECK_THROWS_AS(rmt::w_product(w, 0, 3, {}, 1, 1), rmt::DomainError);   // index range
}

TEST_CASE("haar projection moments: exact product formula") {
  CHECK(rmt::haar_projection_moment(5, 2) == doctest::Approx(1.0 / 5.0).epsilon(1e-15));
  CHECK(rmt::haar_projection_moment(2, 4) == doctest::Approx(3.0 / 8.0).epsilon(1e-15));
  CHECK(rmt::haar_projection_moment(4, 6) ==
        doctest::Approx(15.0 / (4.0 * 6.0 * 8.0)).epsilon(1e-15));
  CHECK(rmt::haar_projection_moment(7, 0) == 1.0);
  CHECK(rmt::haar_projection_moment(7, 3) == 0.0);  // odd moments vanish
  CHECK(rmt::haar_projection_moment(7, 11) == 0.0);
  CHECK_THROWS_AS(rmt::haar_projection_moment(7, 14), rmt::DomainError);
}

TEST_CASE("diagonal spec validates and measures itself") {
  const DiagonalMatrixSpec spec{make_taus({1.0, 2.0, 3.0})};
  CHECK(spec.n() == 3);
  CHECK(spec.hs_norm() == doctest::Approx(std::sqrt(14.0)).epsilon(1e-15));
  CHECK_THROWS_AS(DiagonalMatrixSpec{make_taus({1.0, -2.0})}, rmt::DomainError);
  CHECK_THROWS_AS(DiagonalMatrixSpec{Vector()}, rmt::DomainError);
}

TEST_CASE("k=1 even moments match the closed form") {
  // ((TW)T)_ij = tau_i tau_j w_ij, so the m-th moment is
  // tau_i^m tau_j^m E w^m with E w^m known exactly.
  const DiagonalMatrixSpec spec{make_taus({0.5, 1.0, 1.5, 2.0})};
  RngStream rng(900u, 0u);
  const rmt::MomentReport report = rmt::entry_moment_mc(spec, 1, 4, 1, 3, 20000, rng);
  const double exact = std::pow(1.0, 4) * std::pow(2.0, 4) *
                       rmt::haar_projection_moment(4, 4);
  CHECK(std::abs(report.estimate - exact) <= 3.0 * report.std_error);
  CHECK(report.trials == 20000);
  CHECK(report.bound_value > 0.0);
  CHECK(report.empirical_constant ==
        doctest::Approx(report.estimate / report.bound_value).epsilon(1e-12));
}

TEST_CASE("second moments stay within a constant of the structural bound") {
  for (const auto& [n, k] : std::vector<std::pair<int, int>>{{4, 1}, {4, 2}, {8, 2}}) {
    const DiagonalMatrixSpec spec{Vector::Ones(n)};
    RngStream rng(1000u + static_cast<std::uint64_t>(10 * n + k), 0u);
    const rmt::MomentReport report = rmt::entry_moment_mc(spec, k, 2, 0, 0, 10000, rng);
    INFO("n=", n, " k=", k, " constant=", report.empirical_constant);
    CHECK(report.empirical_constant <= 10.0);
    CHECK(report.empirical_constant > 0.0);
  }
}

TEST_CASE("single w_alpha averages obey the n^(-km/2) envelope") {
  const int k = 2, m = 2;
  for (const int n : {4, 8}) {
    RngStream rng(1100u + static_cast<std::uint64_t>(n), 0u);
    const std::vector<IndexVector> alphas = {{0, 0}, {1, 2}, {3, 3}};
    std::vector<double> sums(alphas.size(), 0.0);
    const int trials = 200000;
    for (int t = 0; t < trials; ++t) {
      const Matrix w = rmt::sample_haar_orthogonal(n, rng);
      for (std::size_t a = 0; a < alphas.size(); ++a) {
        sums[a] += rmt::w_product(w, 0, 0, alphas[a], m, k);
      }
    }
    const double envelope = 5.0 * std::pow(static_cast<double>(n), -0.5 * k * m);
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      INFO("n=", n, " alpha index ", a, " mean=", sums[a] / trials);
      CHECK(std::abs(sums[a] / trials) <= envelope);
    }
  }
}

TEST_CASE("exhaustive sign average kills odd k=1 moments exactly") {
  // At k = 1 the entry is tau_i eps_i w_ij tau_j: a single sign factor, so
  // averaging over all 2^n sign patterns annihilates any odd power exactly,
  // for every fixed W. (At k >= 2 interior path indices can collide with i,
  // leaving even-sign monomials that only the Haar average removes — so the
  // exact enumeration statement is a k = 1 statement.)
  const int n = 3, m = 3;
  RngStream rng(1200u, 0u);
  const Matrix w = rmt::sample_haar_orthogonal(n, rng);
  const Matrix t = make_taus({1.0, 0.7, 1.3}).asDiagonal();
  for (const int i : {0, 1}) {
    for (const int j : {0, 2}) {
      double sum = 0.0;
      double max_abs_term = 0.0;
      for (int mask = 0; mask < (1 << n); ++mask) {
        Vector eps(n);
        for (int b = 0; b < n; ++b) eps(b) = (mask >> b) & 1 ? -1.0 : 1.0;
        const Matrix pw = eps.asDiagonal() * w;
        const Matrix powered = (t * pw) * t;
        const double term = std::pow(powered(i, j), m);
        sum += term;
        max_abs_term = std::max(max_abs_term, std::abs(term));
      }
      CHECK(std::abs(sum) <= 1e-14 * (1.0 + max_abs_term));
    }
  }
}

TEST_CASE("odd off-diagonal moments vanish under the haar average alone") {
  // For i != j and odd m the expectation is zero by sign invariance of the
  // Haar measure (a row/column parity count), with or without symmetrize.
  const DiagonalMatrixSpec spec{Vector::Ones(4)};
  RngStream rng(1250u, 0u);
  const rmt::MomentReport plain = rmt::entry_moment_mc(spec, 2, 3, 0, 1, 20000, rng);
  CHECK(std::abs(plain.estimate) <= 3.0 * plain.std_error);
}

TEST_CASE("symmetrized odd moments vanish within noise") {
  const DiagonalMatrixSpec spec{Vector::Ones(3)};
  RngStream rng(1300u, 0u);
  const rmt::MomentReport report =
      rmt::entry_moment_mc(spec, 2, 3, 0, 1, 20000, rng, /*symmetrize=*/true);
  CHECK(std::abs(report.estimate) <= 3.0 * report.std_error);
}

TEST_CASE("plain and symmetrized-sum estimators agree when paired") {
  const DiagonalMatrixSpec spec{make_taus({1.0, 1.5, 0.5})};
  const int k = 2, m = 2;
  rmt::MomentReport plain;
  rmt::McEstimate reduced;
  {
    RngStream rng(1400u, 0u);
    plain = rmt::entry_moment_mc(spec, k, m, 0, 1, 20000, rng);
  }
  {
    RngStream rng(1400u, 0u);  // the identical stream pairs the samples
    reduced = rmt::symmetrized_moment_sum(spec, k, m, 0, 1, 20000, rng);
  }
  const double combined =
      std::sqrt(plain.std_error * plain.std_error + reduced.std_error * reduced.std_error);
  INFO("plain=", plain.estimate, " reduced=", reduced.value, " combined SE=", combined);
  CHECK(std::abs(plain.estimate - reduced.value) <= 3.0 * combined);
}

TEST_CASE("symmetrized sum guards") {
  const DiagonalMatrixSpec spec{Vector::Ones(3)};
  RngStream rng(1500u, 0u);
  CHECK_THROWS_AS(rmt::symmetrized_moment_sum(spec, 2, 3, 0, 0, 2000, rng),
                  rmt::DomainError);  // odd m
  CHECK_THROWS_AS(rmt::symmetrized_moment_sum(spec, 4, 4, 0, 0, 2000, rng),
                  rmt::CapacityError);  // m(k-1) = 12 > 8
  CHECK_THROWS_AS(rmt::entry_moment_mc(spec, 1, 2, 0, 0, 500, rng),
                  rmt::ConfigError);  // trials below the floor
  CHECK_THROWS_AS(rmt::entry_moment_mc(spec, 1, 2, 5, 0, 2000, rng),
                  rmt::DomainError);  // index out of range
}

TEST_CASE("perturbation scan: exact s^(2k+2) scaling at k=1") {
  // At k = 1 the (i,i) entry is s^2 w_ii, so with shared samples the
  // normalized estimate est(s)/s^4 is the same number at every grid point.
  const DiagonalMatrixSpec spec{Vector::Ones(3)};
  RngStream rng(1600u, 0u);
  const std::vector<double> grid = {0.5, 0.7, 0.9, 1.0};
  const rmt::PerturbationScan scan =
      rmt::diagonal_perturbation_scan(spec, 0, 1, grid, 2000, rng);
  REQUIRE(scan.points.size() == grid.size());
  const double base = scan.points[0].estimate / std::pow(grid[0], 4);
  for (std::size_t g = 1; g < grid.size(); ++g) {
    const double normalized = scan.points[g].estimate / std::pow(grid[g], 4);
    CHECK(normalized == doctest::Approx(base).epsilon(1e-12));
  }
  CHECK(scan.tau_i == 1.0);
}

TEST_CASE("perturbation scan validates its grid") {
  const DiagonalMatrixSpec spec{Vector::Ones(3)};
  RngStream rng(1700u, 0u);
  CHECK_THROWS_AS(
      rmt::diagonal_perturbation_scan(spec, 0, 1, {0.25}, 2000, rng),
      rmt::DomainError);  // below tau_i / 2
  CHECK_THROWS_AS(
      rmt::diagonal_perturbation_scan(spec, 0, 1, {1.5}, 2000, rng),
      rmt::DomainError);  // above tau_i
  CHECK_THROWS_AS(rmt::diagonal_perturbation_scan(spec, 0, 1, {}, 2000, rng),
                  rmt::DomainError);
}

TEST_CASE("exceedance fraction on a hand-built scan") {
  rmt::PerturbationScan scan;
  scan.n = 2;
  scan.k = 1;
  scan.i = 0;
  scan.tau_i = 1.0;
  // Threshold with c = 1: n^-k tau^(2k+2) = 0.5.
  scan.points = {{0.5, 0.4, 0.0}, {0.75, 0.6, 0.0}, {1.0, 0.9, 0.0}};
  CHECK(rmt::exceedance_fraction(scan, 1.0) == doctest::Approx(2.0 / 3.0));
  CHECK(rmt::exceedance_fraction(scan, 0.1) == doctest::Approx(1.0));
  CHECK(rmt::exceedance_fraction(scan, 10.0) == doctest::Approx(0.0));
}
