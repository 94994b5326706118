#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "khessian/cone.hpp"
#include "khessian/seeds.hpp"
#include "oracles.hpp"

using namespace khessian;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const double kGolden = (1.0 + std::sqrt(5.0)) / 2.0;

// Subset-enumeration membership: every sigma_j > 0 for j <= k.
bool oracle_in_gamma(const std::vector<double>& v, int k) {
  for (int j = 1; j <= k; ++j)
    if (!(oracle::brute_sigma(v, j) > 0.0)) return false;
  return true;
}

Spectrum random_spectrum(std::mt19937_64& rng, int n, double lo = -3.0, double hi = 3.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (auto& x : v) x = u(rng);
  return Spectrum(std::move(v));
}

}  // namespace

TEST_CASE("in_gamma_k") {
  for (int k = 1; k <= 5; ++k) CHECK(in_gamma_k({1, 1, 1, 1, 1}, k));
  // sigma_2 vanishes here; rounding may leave it either side of zero
  CHECK_FALSE(in_gamma_k({1, kGolden, -1 / kGolden}, 2, kConeTol));
  CHECK_FALSE(in_gamma_k({1, kGolden, -1.001 / kGolden}, 2, 0.0));
  CHECK(in_gamma_k({1, kGolden, -1 / kGolden}, 1, 0.0));
  CHECK_FALSE(in_gamma_k({1, 0.5, -10, 2}, 1));
  CHECK_THROWS_AS(in_gamma_k({1, 2}, 3), DomainError);

  std::mt19937_64 rng(1);
  for (int s = 0; s < 2000; ++s) {
    const Spectrum lam = random_spectrum(rng, 4);
    for (int k = 1; k <= 4; ++k) {
      REQUIRE(in_gamma_k(lam, k) == oracle_in_gamma(lam.vector(), k));
      if (in_gamma_k(lam, k))
        for (int j = 1; j < k; ++j) REQUIRE(in_gamma_k(lam, j));
    }
  }
}

TEST_CASE("sampled Garding cone test") {
  CHECK(in_garding_cone_sampled({1, 1, 1}, 2));
  CHECK_FALSE(in_garding_cone_sampled({-1, 0, 0}, 1));
  CHECK_FALSE(in_garding_cone_sampled({-1, 0, 0, 0}, 3));
  // sigma_2 (s e + lambda) > 0 for every s >= 0 iff lambda in Gamma_2
  CHECK(in_garding_cone_sampled({3, 2, -1}, 2));
  CHECK_FALSE(in_garding_cone_sampled({1, kGolden, -1.001 / kGolden}, 2));
}

TEST_CASE("deleted-variable cone") {
  CHECK(in_gamma_tilde({1, 1, 1, 1}, 3));
  for (auto [k, n] : {std::pair{2, 3}, std::pair{3, 5}}) {
    auto v = p2_example(k, n).vector();
    v[static_cast<std::size_t>(k)] *= 1.001;  // push the negative entry just outside
    CHECK_FALSE(in_gamma_tilde(Spectrum(v), k));
  }
  CHECK_THROWS_AS(in_gamma_tilde(Spectrum(std::vector<double>(24, 1.0)), 12), CapacityError);
}

TEST_CASE("three cone definitions agree on random samples") {
  std::mt19937_64 rng(7);
  const int pairs[][2] = {{3, 2}, {4, 2}, {4, 3}, {5, 3}};
  for (auto [n, k] : pairs) {
    int disagreements = 0;
    for (int s = 0; s < 2000; ++s) {
      const Spectrum lam = random_spectrum(rng, n);
      const auto sig = elem_sym_all(lam, k);
      bool near = false;
      for (int j = 1; j <= k; ++j) near = near || std::abs(sig[j]) < kConeTol;
      if (near) continue;
      const bool a = in_gamma_k(lam, k);
      disagreements += (a != in_garding_cone_sampled(lam, k)) + (a != in_gamma_tilde(lam, k));
    }
    CHECK(disagreements == 0);
  }
}

TEST_CASE("classify_boundary on fixed points") {
  const auto p2 = classify_boundary({1, kGolden, -1 / kGolden}, 2);
  CHECK(p2.kind == ConeKind::BoundaryP2);
  CHECK_THAT(p2.sigmas[3], WithinAbs(-1.0, 1e-14));
  CHECK(p2.km1_row_min > 0.0);
  CHECK_FALSE(p2.ambiguous);

  const auto p1 = classify_boundary({1, 1, 0, 0}, 3);
  CHECK(p1.kind == ConeKind::BoundaryP1);
  CHECK(p1.sigmas[2] == 1.0);
  // sigma_{2;i} vanishes for the positive entries
  CHECK(p1.km1_row[0] == 0.0);
  CHECK(p1.km1_row[1] == 0.0);

  CHECK(classify_boundary({1, 1, 1}, 2).kind == ConeKind::Interior);
  CHECK(classify_boundary({-1, -1, -1}, 2).kind == ConeKind::Outside);
  CHECK(classify_boundary({-1, -1, -1}, 2).margin < 0.0);
  CHECK_THROWS_AS(classify_boundary({1, 1}, 2), DomainError);
  CHECK_THROWS_AS(classify_boundary({1, 1, 1}, 0), DomainError);
}

TEST_CASE("classification near a border is flagged") {
  const auto v = classify_boundary({1, kGolden, -1 / kGolden + 4e-10}, 2);
  CHECK(v.ambiguous);
  const auto w = classify_boundary({1, kGolden, -1 / kGolden + 1e-3}, 2);
  CHECK(w.kind == ConeKind::Interior);
  CHECK_FALSE(w.ambiguous);
}

TEST_CASE("P1 points built from k-1 positive entries") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  for (int n = 3; n <= 7; ++n)
    for (int k = 2; k < n; ++k) {
      std::vector<double> v(static_cast<std::size_t>(n), 0.0);
      for (int i = 0; i < k - 1; ++i) v[static_cast<std::size_t>(i)] = u(rng);
      const auto verdict = classify_boundary(Spectrum(v), k);
      CHECK(verdict.kind == ConeKind::BoundaryP1);
      for (int j = k; j <= n; ++j) CHECK(std::abs(elem_sym(Spectrum(v), j)) <= 1e-12);
    }
}

TEST_CASE("P2 verdicts carry a positive (k-1)-row") {
  std::mt19937_64 rng(8);
  int seen = 0;
  for (int s = 0; s < 20000; ++s) {
    Spectrum lam = random_spectrum(rng, 4);
    // Move the last entry onto sigma_2 = 0 when the equation is solvable.
    const double a = elem_sym_deleted(lam, 1, {3});
    if (std::abs(a) < 1e-3) continue;
    lam[3] = -elem_sym_deleted(lam, 2, {3}) / a;
    const auto v = classify_boundary(lam, 2);
    if (v.kind != ConeKind::BoundaryP2) continue;
    ++seen;
    REQUIRE(v.km1_row_min > 0.0);
  }
  CHECK(seen > 100);
}

TEST_CASE("Garding inequality") {
  CHECK_THAT(garding_slack({1, 1, 1, 1}, {1, 1, 1, 1}, 2), WithinAbs(0.0, 1e-12));
  CHECK_THROWS_AS(garding_slack({1, 1, 1, 1}, {-1, -1, -1, -1}, 2), DomainError);
  CHECK_THROWS_AS(garding_inequality_check({1, 1, 1}, {1, 1, 1, 1}, 2), DomainError);

  std::mt19937_64 rng(12);
  int pairs = 0;
  while (pairs < 2000) {
    const Spectrum lam = random_spectrum(rng, 4, -1.5, 3.0);
    const Spectrum mu = random_spectrum(rng, 4, -1.5, 3.0);
    if (!in_gamma_k(lam, 2) || !in_gamma_k(mu, 2)) continue;
    ++pairs;
    REQUIRE(garding_inequality_check(lam, mu, 2));
  }

  // mu = 2 lambda: both sides double, slack = 2 * slack(lambda, lambda) = 0
  const Spectrum lam({2.0, 1.5, 1.0, 0.5, -0.2});
  REQUIRE(in_gamma_k(lam, 3));
  const auto row = sigma_km1_row(lam, 3);
  double lhs = 0.0;
  for (int i = 0; i < 5; ++i) lhs += row[static_cast<std::size_t>(i)] * 2.0 * lam[i];
  const double rhs = 3.0 * std::pow(elem_sym(lam, 3), 2.0 / 3.0) * std::pow(elem_sym(lam.scaled(2.0), 3), 1.0 / 3.0);
  CHECK_THAT(garding_slack(lam, lam.scaled(2.0), 3), WithinAbs(lhs - rhs, 1e-12));
  CHECK(garding_inequality_check(lam, lam.scaled(2.0), 3));
}

TEST_CASE("descending order facts") {
  const auto f = descending_order_facts({3, 2, 1}, 2);
  CHECK(f.positive_count == 3);
  CHECK(f.row_sorted);
  const auto g = descending_order_facts(Spectrum({1, kGolden, -1 / kGolden}).sorted_descending(), 2);
  CHECK(g.row_sorted);
  CHECK_THROWS_AS(descending_order_facts({1, 2, 3}, 2), DomainError);
  CHECK_THROWS_AS(descending_order_facts({-1, -2, -3}, 2), DomainError);

  std::mt19937_64 rng(15);
  int used = 0;
  while (used < 1000) {
    const Spectrum lam = random_spectrum(rng, 5, -1.5, 3.0).sorted_descending();
    const int k = 3;
    if (!in_gamma_k(lam, k)) continue;
    ++used;
    const auto facts = descending_order_facts(lam, k);
    REQUIRE(facts.positive_count >= k);
    REQUIRE(facts.row_sorted);
  }
}

TEST_CASE("nondecreasing row on Gamma_{k-1} with nonnegative first entry") {
  std::mt19937_64 rng(16);
  int used = 0;
  while (used < 1000) {
    const Spectrum lam = random_spectrum(rng, 5).sorted_descending();
    const int k = 3;
    if (!in_gamma_k(lam, k - 1)) continue;
    const auto row = sigma_km1_row(lam, k);
    if (row[0] < 0.0) continue;
    ++used;
    for (std::size_t i = 0; i + 1 < row.size(); ++i) REQUIRE(row[i] <= row[i + 1] + 1e-12);
  }
}
