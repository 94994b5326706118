#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "khessian/minors.hpp"
#include "khessian/symfun.hpp"
#include "oracles.hpp"

using namespace khessian;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("S_k of special matrices") {
  for (int n = 1; n <= 4; ++n)
    for (int k = 1; k <= n; ++k) CHECK(sk_of_matrix(SmallMatrix::identity(n), k) == binomial(n, k));

  const std::vector<double> lam = {0.3, -1.2, 2.5, 0.7};
  for (int k = 1; k <= 4; ++k)
    CHECK_THAT(sk_of_matrix(SmallMatrix::diagonal(lam), k), WithinAbs(elem_sym(Spectrum(lam), k), 1e-14));

  CHECK_THROWS_AS(sk_of_matrix(SmallMatrix::identity(3), 4), DomainError);
  CHECK_THROWS_AS(sk_of_matrix(SmallMatrix::identity(3), 0), DomainError);
  CHECK_THROWS_AS(SmallMatrix(5), DomainError);
}

TEST_CASE("S_k against elimination determinants and the trace formula") {
  std::mt19937_64 rng(2);
  for (int s = 0; s < 200; ++s) {
    for (int n = 1; n <= 4; ++n) {
      const SmallMatrix r = oracle::random_symmetric(rng, n, 2.0);
      for (int k = 1; k <= n; ++k) REQUIRE_THAT(sk_of_matrix(r, k), WithinAbs(oracle::sk_matrix(r, k), 1e-12));
    }
    const SmallMatrix r = oracle::random_symmetric(rng, 3);
    double tr = 0.0;
    double tr2 = 0.0;
    for (int i = 0; i < 3; ++i) {
      tr += r(i, i);
      for (int j = 0; j < 3; ++j) tr2 += r(i, j) * r(j, i);
    }
    REQUIRE_THAT(sk_of_matrix(r, 2), WithinAbs(0.5 * (tr * tr - tr2), 1e-13));
  }
}

TEST_CASE("S_k gradient") {
  const SmallMatrix g = sk_gradient(SmallMatrix::identity(3), 2);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(g(i, j) == (i == j ? 2.0 : 0.0));

  const std::vector<double> lam = {0.3, -1.2, 2.5, 0.7};
  for (int k = 1; k <= 4; ++k) {
    const SmallMatrix d = sk_gradient(SmallMatrix::diagonal(lam), k);
    const auto row = sigma_km1_row(Spectrum(lam), k);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) CHECK_THAT(d(i, j), WithinAbs(i == j ? row[static_cast<std::size_t>(i)] : 0.0, 1e-14));
  }
}

TEST_CASE("S_k gradient matches central differences") {
  std::mt19937_64 rng(6);
  const double step = 1e-5;
  for (int n = 1; n <= 4; ++n)
    for (int k = 1; k <= n; ++k)
      for (int s = 0; s < 100; ++s) {
        SmallMatrix r = oracle::random_symmetric(rng, n, 2.0);
        const SmallMatrix g = sk_gradient(r, k);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            const double keep = r(i, j);
            r(i, j) = keep + step;
            const double up = sk_of_matrix(r, k);
            r(i, j) = keep - step;
            const double down = sk_of_matrix(r, k);
            r(i, j) = keep;
            const double fd = (up - down) / (2 * step);
            REQUIRE(std::abs(fd - g(i, j)) <= 1e-7 * std::max(1.0, std::abs(g(i, j))));
          }
        // symmetric input gives a symmetric gradient
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) REQUIRE_THAT(g(i, j), WithinAbs(g(j, i), 1e-14));
      }
}
