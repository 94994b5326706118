#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "khessian/cone.hpp"
#include "khessian/seeds.hpp"
#include "oracles.hpp"

using namespace khessian;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("p2_example") {
  const Spectrum a = p2_example(2, 3);
  CHECK_THAT(a[0], WithinRel(1.0, 1e-15));
  CHECK_THAT(a[1], WithinRel((1 + std::sqrt(5.0)) / 2, 1e-15));
  CHECK_THAT(a[2], WithinRel(-2 / (1 + std::sqrt(5.0)), 1e-15));
  CHECK_THAT(oracle::brute_sigma(a.vector(), 2), WithinAbs(0.0, 1e-14));
  CHECK_THAT(oracle::brute_sigma(a.vector(), 3), WithinAbs(-1.0, 1e-14));

  const Spectrum b = p2_example(3, 5);
  CHECK_THAT(b[2], WithinRel((2 + std::sqrt(8.0)) / 2, 1e-15));
  CHECK_THAT(oracle::brute_sigma(b.vector(), 3), WithinAbs(0.0, 1e-13));
  CHECK_THAT(oracle::brute_sigma(b.vector(), 4), WithinAbs(-1.0, 1e-13));
  CHECK(oracle::brute_sigma(b.vector(), 5) == 0.0);

  CHECK_THROWS_AS(p2_example(2, 2), DomainError);
  CHECK_THROWS_AS(p2_example(1, 3), DomainError);
}

TEST_CASE("seed_for_zero") {
  const auto s = seed_for_zero(2, 3, 0.5, 0.25);
  CHECK(s.tau == p2_example(2, 3));
  CHECK(s.c == 0.0);
  CHECK_THAT(s.eps_prime, WithinRel(0.5, 1e-15));
  CHECK(seed_for_zero(3, 4, 0.75, 0.25).eps_prime == 0.25);

  const auto cert = certify_seed(s);
  CHECK(cert.convexity_class == 1);
  REQUIRE(cert.not_class.has_value());
  CHECK(*cert.not_class == 3);
  CHECK(cert.ellipticity_margin > 0.0);

  CHECK_THROWS_AS(seed_for_zero(2, 2), DomainError);
  CHECK_THROWS_AS(seed_for_zero(2, 3, 1.0), DomainError);
}

TEST_CASE("seed_for_negative") {
  const auto s = seed_for_negative(2, 3, -1.0);
  CHECK_THAT(elem_sym(s.tau, 2), WithinAbs(-1.0, 1e-12));
  CHECK(elem_sym(s.tau, 1) > 0.0);
  const auto row = sigma_km1_row(s.tau, 2);
  for (std::size_t i = 0; i < row.size(); ++i) {
    CHECK(row[i] > 0.0);
    if (i + 1 < row.size()) CHECK(row[i] <= row[i + 1]);
  }
  const auto cert = certify_seed(s);
  REQUIRE(cert.not_class.has_value());
  CHECK(*cert.not_class == 2);

  // sigma_2(s lambda) = s^2 sigma_2(lambda): tau(-8) = sqrt(8) tau(-1)
  const auto t = seed_for_negative(2, 3, -8.0);
  CHECK(t.lift_t == s.lift_t);
  CHECK(t.lift_delta == s.lift_delta);
  for (int i = 0; i < 3; ++i) CHECK_THAT(t.tau[i], WithinRel(std::sqrt(8.0) * s.tau[i], 1e-14));

  CHECK_THROWS_AS(seed_for_negative(2, 3, 1.0), DomainError);
  CHECK_THROWS_AS(seed_for_negative(3, 3, -1.0), DomainError);
}

TEST_CASE("seed_for_positive") {
  const auto eq = seed_for_positive(2, 3, 3.0, 2);
  for (int i = 0; i < 3; ++i) CHECK_THAT(eq.tau[i], WithinRel(1.0, 1e-15));
  CHECK(certify_seed(eq).convexity_class == 3);
  CHECK_FALSE(certify_seed(eq).not_class.has_value());

  const auto s = seed_for_positive(2, 4, 1.0, 1);
  CHECK_THAT(elem_sym(s.tau, 2), WithinRel(1.0, 1e-12));
  CHECK(elem_sym(s.tau, 3) < 0.0);
  CHECK(s.convexity_class == 2);

  const auto t = seed_for_positive(2, 4, 1.0, 2);
  CHECK(t.convexity_class == 3);
  CHECK(elem_sym(t.tau, 4) < 0.0);

  CHECK_THROWS_AS(seed_for_positive(2, 3, 1.0, 0), DomainError);
  CHECK_THROWS_AS(seed_for_positive(2, 3, 1.0, 3), DomainError);
  CHECK_THROWS_AS(seed_for_positive(2, 3, -1.0, 1), DomainError);
}

TEST_CASE("every seed of the test matrix is elliptic and hits its value") {
  for (int k : {2, 3})
    for (int n : {3, 4, 5}) {
      if (k > n - 1) continue;
      for (double c : {-10.0, -1.0, 0.0, 1.0, 10.0}) {
        const int lmax = c > 0.0 ? n - k + 1 : 1;
        for (int l = 1; l <= lmax; ++l) {
          INFO("k=" << k << " n=" << n << " c=" << c << " l=" << l);
          const auto s = seed_for_value(k, n, c, l);
          CHECK(std::abs(elem_sym(s.tau, k) - c) <= 1e-10 * std::max(1.0, std::abs(c)));
          CHECK(certify_seed(s).ellipticity_margin > 0.0);
          if (c < 0.0) CHECK(*certify_seed(s).not_class == k);
          if (c == 0.0) CHECK(certify_seed(s).convexity_class == k - 1);
          if (c > 0.0) CHECK(certify_seed(s).convexity_class == std::min(k + l - 1, n));
        }
      }
    }
}

TEST_CASE("epsilon helpers") {
  CHECK_THAT(eps_prime_for(0.25, 0.5), WithinRel(0.5, 1e-15));
  CHECK(eps_prime_for(0.25, 0.75) == 0.25);
  CHECK_THROWS_AS(eps_prime_for(0.25, 1.0), DomainError);
  CHECK_THROWS_AS(eps_prime_for(0.0, 0.5), DomainError);
  const auto s = with_epsilon(seed_for_zero(2, 3), 0.0625);
  CHECK(s.eps == 0.0625);
  CHECK_THAT(s.eps_prime, WithinRel(0.25, 1e-15));
}
