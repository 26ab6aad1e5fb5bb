#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "rmt/errors.hpp"
#include "rmt/matrix.hpp"
#include "rmt/power.hpp"
#include "rmt/rng.hpp"
#include "rmt/sampling.hpp"
#include "rmt/stats.hpp"
#include "rmt/svd.hpp"

using rmt::Matrix;
using rmt::PowerSpectrum;
using rmt::RngStream;
using rmt::Vector;

TEST_CASE("matrix_power conventions and hand values") {
  Matrix a(2, 2);
  a << 1.0, 1.0, 0.0, 1.0;
  CHECK((rmt::matrix_power(a, 0) - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((rmt::matrix_power(a, 1) - a).cwiseAbs().maxCoeff() == 0.0);
  const Matrix a3 = rmt::matrix_power(a, 3);
  CHECK(a3(0, 0) == 1.0);
  CHECK(a3(0, 1) == 3.0);  // upper shear accumulates linearly
  CHECK(a3(1, 0) == 0.0);
  CHECK(a3(1, 1) == 1.0);
  CHECK_THROWS_AS(rmt::matrix_power(a, -1), rmt::DomainError);
}

TEST_CASE("diagonal example: every statistic is read off the diagonal") {
  Matrix g = Matrix::Zero(2, 2);
  g(0, 0) = 2.0;
  g(1, 1) = 0.5;
  // G^2 = diag(4, 1/4): s_min = 1/4; G^-2 = diag(1/4, 4).
  CHECK(rmt::smin_of_power(g, 2) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(rmt::spec_norm_inverse_power(g, 2) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(rmt::hs_norm_inverse_power(g, 2) ==
        doctest::Approx(std::sqrt(16.0 + 1.0 / 16.0)).epsilon(1e-12));
}

TEST_CASE("orthogonal matrices: inverse powers keep norm sqrt(n)") {
  RngStream rng(21u, 0u);
  const Matrix q = rmt::sample_haar_orthogonal(7, rng);
  for (int k = 1; k <= 4; ++k) {
    CHECK(rmt::smin_of_power(q, k) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(rmt::hs_norm_inverse_power(q, k) ==
          doctest::Approx(std::sqrt(7.0)).epsilon(1e-10));
    CHECK(rmt::spec_norm_inverse_power(q, k) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("inverse_from_svd inverts, and refuses numerically singular input") {
  RngStream rng(22u, 0u);
  const Matrix g = rmt::sample_gaussian_matrix(6, rng);
  const rmt::SvdFactors f = rmt::svd(g);
  const Matrix inv = rmt::inverse_from_svd(f);
  CHECK((g * inv - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff() <= 1e-10);

  rmt::SvdFactors singular = f;
  singular.sigma(5) = 1e-300;
  CHECK_THROWS_AS(rmt::inverse_from_svd(singular), rmt::SingularMatrixError);
  CHECK_THROWS_AS(rmt::inverse_power_from_svd(singular, 2), rmt::SingularMatrixError);
}

TEST_CASE("inverse powers agree with the naive inverse at moderate conditioning") {
  // The naive route (invert G^k directly) is the independent oracle; it is
  // legitimate only when kappa(G)^k is far from 1/epsilon, so n = 10 random
  // samples with kappa ~ 10^1..10^2 and k <= 3 are safe territory.
  for (const std::uint64_t seed : {101u, 102u, 103u}) {
    RngStream rng(seed, 0u);
    const Matrix g = rmt::sample_gaussian_matrix(10, rng);
    REQUIRE(rmt::condition_number(g) < 1e4);
    const rmt::SvdFactors f = rmt::svd(g);
    for (int k = 1; k <= 3; ++k) {
      const Matrix via_svd = rmt::inverse_power_from_svd(f, k);
      const Matrix naive = rmt::matrix_power(g, k).inverse();
      const double rel = (via_svd - naive).cwiseAbs().maxCoeff() /
                         naive.cwiseAbs().maxCoeff();
      CHECK(rel <= 1e-8);

      const PowerSpectrum spectrum = rmt::inverse_power_spectrum(f, k);
      CHECK(spectrum.hs_inv == doctest::Approx(rmt::hs_norm(naive)).epsilon(1e-8));
      CHECK(spectrum.spec_inv ==
            doctest::Approx(rmt::singular_values(naive)(0)).epsilon(1e-8));
    }
  }
}

TEST_CASE("spectrum invariants hold on random samples") {
  for (const std::uint64_t seed : {31u, 32u, 33u, 34u, 35u}) {
    RngStream rng(seed, 0u);
    const Matrix g = rmt::sample_gaussian_matrix(8, rng);
    const rmt::SvdFactors f = rmt::svd(g);
    const double smin_g = f.sigma(7);
    const double smax_g = f.sigma(0);
    for (int k = 1; k <= 4; ++k) {
      const PowerSpectrum s = rmt::inverse_power_spectrum(f, k);
      CHECK(s.hs_inv >= s.spec_inv);
      CHECK(s.log_hs_inv >= s.log_spec_inv);
      CHECK(s.smin_power * s.spec_inv == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(s.log_smin_power == -s.log_spec_inv);  // exact by construction
      // Submultiplicativity sandwich for s_min(G^k).
      CHECK(s.smin_power >= std::pow(smin_g, k) * (1.0 - 1e-8));
      CHECK(s.smin_power <= smin_g * std::pow(smax_g, k - 1) * (1.0 + 1e-8));
      // Log and linear representations agree while the linear one is finite.
      CHECK(std::log(s.hs_inv) == doctest::Approx(s.log_hs_inv).epsilon(1e-12));
    }
  }
}

TEST_CASE("k=1 spectrum from singular values alone") {
  Vector sigma(3);
  sigma << 4.0, 2.0, 1.0;
  const PowerSpectrum s = rmt::inverse_spectrum_from_sigma(sigma);
  CHECK(s.smin_power == 1.0);
  CHECK(s.spec_inv == 1.0);
  CHECK(s.hs_inv == doctest::Approx(std::sqrt(1.0 + 0.25 + 1.0 / 16.0)).epsilon(1e-14));
  CHECK(s.method == rmt::SpectrumMethod::direct);

  RngStream rng(41u, 0u);
  const Matrix g = rmt::sample_gaussian_matrix(9, rng);
  const rmt::SvdFactors f = rmt::svd(g);
  const PowerSpectrum fast = rmt::inverse_spectrum_from_sigma(f.sigma);
  const PowerSpectrum full = rmt::inverse_power_spectrum(f, 1);
  CHECK(fast.hs_inv == doctest::Approx(full.hs_inv).epsilon(1e-12));
  CHECK(fast.spec_inv == doctest::Approx(full.spec_inv).epsilon(1e-12));
  CHECK(rmt::smin_of_power(g, 1) == doctest::Approx(f.sigma(8)).epsilon(1e-10));
}

TEST_CASE("log fields stay finite deep in the saturation regime") {
  // sigma_min = 1e-200 at k = 3 puts ||G^-k|| at 1e600: far beyond double
  // range, so the linear fields saturate while the logs carry the value.
  rmt::SvdFactors f;
  f.u = Matrix::Identity(2, 2);
  f.v = Matrix::Identity(2, 2);
  f.sigma = Vector(2);
  f.sigma << 1.0, 1e-200;
  const PowerSpectrum s = rmt::inverse_power_spectrum(f, 3);
  CHECK(std::isfinite(s.log_hs_inv));
  CHECK(std::isfinite(s.log_spec_inv));
  CHECK(std::isfinite(s.log_smin_power));
  CHECK(s.log_spec_inv == doctest::Approx(-3.0 * std::log(1e-200)).epsilon(1e-10));
  CHECK(s.log_hs_inv >= s.log_spec_inv);
  CHECK(std::isinf(s.hs_inv));   // documented saturation of the linear field
  CHECK(s.smin_power == 0.0);    // underflow side of the same coin
}

TEST_CASE("factored representation at k=1 is exactly diag(1/sigma)") {
  RngStream rng(51u, 0u);
  const Matrix q = rmt::sample_haar_orthogonal(5, rng);
  Vector sigma(5);
  sigma << 5.0, 3.0, 2.0, 1.5, 0.25;
  const Matrix b = rmt::factored_inverse_power(sigma, q, 1);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      CHECK(b(i, j) == (i == j ? 1.0 / sigma(i) : 0.0));
    }
}

TEST_CASE("factored matrix and factored spectrum agree") {
  for (const std::uint64_t seed : {61u, 62u}) {
    RngStream rng_g(seed, 0u);
    RngStream rng_q(seed, 1u);
    const Matrix g = rmt::sample_gaussian_matrix(8, rng_g);
    const Vector sigma = rmt::singular_values(g);
    const Matrix q = rmt::sample_haar_orthogonal(8, rng_q);
    for (int k = 1; k <= 3; ++k) {
      const Matrix b = rmt::factored_inverse_power(sigma, q, k);
      const PowerSpectrum s = rmt::factored_inverse_power_spectrum(sigma, q, k);
      CHECK(s.method == rmt::SpectrumMethod::factored);
      CHECK(rmt::hs_norm(b) == doctest::Approx(s.hs_inv).epsilon(1e-10));
      CHECK(rmt::singular_values(b)(0) == doctest::Approx(s.spec_inv).epsilon(1e-10));
    }
  }
}

TEST_CASE("factored representation validates its inputs") {
  RngStream rng(71u, 0u);
  const Matrix q = rmt::sample_haar_orthogonal(3, rng);
  Vector good(3);
  good << 3.0, 2.0, 1.0;

  Vector increasing(3);
  increasing << 1.0, 2.0, 3.0;
  CHECK_THROWS_AS(rmt::factored_inverse_power(increasing, q, 2), rmt::DomainError);

  Vector nonpositive(3);
  nonpositive << 3.0, 2.0, 0.0;
  CHECK_THROWS_AS(rmt::factored_inverse_power(nonpositive, q, 2), rmt::DomainError);

  Matrix not_orthogonal = Matrix::Identity(3, 3);
  not_orthogonal(0, 1) = 0.5;
  CHECK_THROWS_AS(rmt::factored_inverse_power(good, not_orthogonal, 2), rmt::DomainError);

  CHECK_THROWS_AS(rmt::factored_inverse_power(good, q, 0), rmt::DomainError);
}

TEST_CASE("direct and factored routes are equidistributed") {
  // The law of ||G^-k||_HS must match the law of the factored statistic
  // built from an independent spectrum and an independent Haar factor.
  const int trials = 100000;
  for (const int n : {4, 8, 16}) {
    for (const int k : {1, 2, 3}) {
      std::vector<double> direct, factored;
      direct.reserve(trials);
      factored.reserve(trials);
      const auto base = static_cast<std::uint64_t>(1000 * n + k);
      for (int t = 0; t < trials; ++t) {
        RngStream rng_d(base, 3u * static_cast<std::uint64_t>(t));
        const Matrix g = rmt::sample_gaussian_matrix(n, rng_d);
        if (k == 1) {
          const Vector sigma = rmt::singular_values(g);
          if (sigma(n - 1) < rmt::kSingularCutoff) continue;
          direct.push_back(rmt::inverse_spectrum_from_sigma(sigma).log_hs_inv);
        } else {
          const rmt::SvdFactors f = rmt::svd(g);
          if (f.sigma(n - 1) < rmt::kSingularCutoff) continue;
          direct.push_back(rmt::inverse_power_spectrum(f, k).log_hs_inv);
        }

        RngStream rng_g(base, 3u * static_cast<std::uint64_t>(t) + 1u);
        const Matrix g2 = rmt::sample_gaussian_matrix(n, rng_g);
        const Vector sigma2 = rmt::singular_values(g2);
        if (sigma2(n - 1) < rmt::kSingularCutoff) continue;
        if (k == 1) {
          factored.push_back(
              rmt::inverse_spectrum_from_sigma(sigma2, rmt::SpectrumMethod::factored)
                  .log_hs_inv);
        } else {
          RngStream rng_q(base, 3u * static_cast<std::uint64_t>(t) + 2u);
          const Matrix q = rmt::sample_haar_orthogonal(n, rng_q);
          factored.push_back(
              rmt::factored_inverse_power_spectrum(sigma2, q, k).log_hs_inv);
        }
      }
      const rmt::KsResult ks = rmt::ks_two_sample(direct, factored);
      INFO("n=", n, " k=", k, " KS=", ks.statistic, " p=", ks.p_value);
      CHECK(ks.p_value >= 0.01);
    }
  }
}
