#pragma once

/// Randomized property sweeps over the cone and symmetric-function layers.
/// Each sweep is deterministic in its seed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <boost/math/tools/roots.hpp>
#include <json.hpp>

#include "khessian/cone.hpp"
#include "khessian/errors.hpp"
#include "khessian/seeds.hpp"
#include "khessian/symfun.hpp"

namespace khessian {

struct VerifyResult {
  std::string suite;
  long checked = 0;
  long failed = 0;
  long skipped = 0;
  double worst = 0.0;  // suite-specific worst observed error or slack
  std::vector<nlohmann::json> counterexamples;

  bool ok() const noexcept { return failed == 0; }
};

inline nlohmann::json to_json(const VerifyResult& r) {
  return {{"suite", r.suite},       {"checked", r.checked}, {"failed", r.failed},
          {"skipped", r.skipped},   {"worst", r.worst},     {"counterexamples", r.counterexamples}};
}

namespace detail {

inline constexpr std::size_t kMaxCounterexamples = 10;

inline Spectrum uniform_spectrum(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (auto& x : v) x = u(rng);
  return Spectrum(std::move(v));
}

// Rejection sampling in Gamma_k(n); entries biased to the positive side.
inline Spectrum sample_in_gamma(std::mt19937_64& rng, int n, int k) {
  for (;;) {
    Spectrum s = uniform_spectrum(rng, n, -1.5, 3.0);
    if (in_gamma_k(s, k, 1e-6)) return s;
  }
}

inline void record_failure(VerifyResult& r, nlohmann::json ex) {
  ++r.failed;
  if (r.counterexamples.size() < kMaxCounterexamples) r.counterexamples.push_back(std::move(ex));
}

// sigma_k(|lambda|): the natural magnitude for rounding error in sigma_k(lambda).
inline double abs_scale(const Spectrum& lam, int k) {
  std::vector<double> a(lam.begin(), lam.end());
  for (auto& x : a) x = std::abs(x);
  return std::max(1.0, elem_sym(Spectrum(std::move(a)), k));
}

}  // namespace detail

/// Three membership tests for Gamma_k agree away from the hypersurfaces
/// |sigma_j| < tol, j <= k.
inline VerifyResult verify_cone_equivalence(long samples, std::uint64_t seed, double tol = kConeTol) {
  VerifyResult r;
  r.suite = "cone-equivalence";
  std::mt19937_64 rng(seed);
  const int pairs[][2] = {{3, 2}, {4, 2}, {4, 3}, {5, 3}};
  for (auto [n, k] : pairs) {
    for (long s = 0; s < samples; ++s) {
      const Spectrum lam = detail::uniform_spectrum(rng, n, -3.0, 3.0);
      const auto sig = elem_sym_all(lam, k);
      bool near = false;
      for (int j = 1; j <= k; ++j) near = near || std::abs(sig[j]) < tol;
      if (near) {
        ++r.skipped;
        continue;
      }
      ++r.checked;
      const bool a = in_gamma_k(lam, k);
      const bool b = in_garding_cone_sampled(lam, k);
      const bool c = in_gamma_tilde(lam, k);
      if (a != b || a != c)
        detail::record_failure(r, {{"n", n}, {"k", k}, {"lambda", lam.vector()}, {"gamma", a}, {"garding", b}, {"tilde", c}});
    }
  }
  return r;
}

/// [sigma_l / C(n,l)]^{1/l} nonincreasing in l = 1..k on Gamma_k(n).
inline VerifyResult verify_maclaurin(long samples, std::uint64_t seed) {
  VerifyResult r;
  r.suite = "maclaurin";
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dim(3, 6);
  for (long s = 0; s < samples; ++s) {
    const int n = dim(rng);
    const int k = std::uniform_int_distribution<int>(2, n)(rng);
    const Spectrum lam = detail::sample_in_gamma(rng, n, k);
    ++r.checked;
    double prev = maclaurin_mean(lam, 1);
    for (int l = 2; l <= k; ++l) {
      const double cur = maclaurin_mean(lam, l);
      const double excess = cur - prev;
      r.worst = std::max(r.worst, excess / std::max(1.0, prev));
      if (excess > 1e-12 * std::max(1.0, prev)) {
        detail::record_failure(r, {{"n", n}, {"k", k}, {"l", l}, {"lambda", lam.vector()}, {"prev", prev}, {"cur", cur}});
        break;
      }
      prev = cur;
    }
  }
  return r;
}

/// Garding inequality on Gamma_2(4) and Gamma_3(5) with slack >= -1e-10, and
/// equality at mu = lambda.
inline VerifyResult verify_garding_inequality(long samples, std::uint64_t seed) {
  VerifyResult r;
  r.suite = "garding-inequality";
  r.worst = 0.0;
  std::mt19937_64 rng(seed);
  const int pairs[][2] = {{4, 2}, {5, 3}};
  for (auto [n, k] : pairs) {
    for (long s = 0; s < samples; ++s) {
      const Spectrum lam = detail::sample_in_gamma(rng, n, k);
      const Spectrum mu = detail::sample_in_gamma(rng, n, k);
      ++r.checked;
      const double slack = garding_slack(lam, mu, k);
      const double self = garding_slack(lam, lam, k);
      r.worst = std::min(r.worst, slack);
      if (slack < -1e-10 || std::abs(self) > 1e-10)
        detail::record_failure(r, {{"n", n}, {"k", k}, {"lambda", lam.vector()}, {"mu", mu.vector()}, {"slack", slack},
                                   {"self_slack", self}});
    }
  }
  return r;
}

/// Deletion recursion, row sum, shift expansion and Euler identity at
/// relative 1e-12 (relative to sigma_k(|lambda|)), n <= 8.
inline VerifyResult verify_identities(long samples, std::uint64_t seed, double rel_tol = 1e-12) {
  VerifyResult r;
  r.suite = "identities";
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dim(2, 8);
  std::uniform_real_distribution<double> shift(-1.0, 1.0);
  for (long s = 0; s < samples; ++s) {
    const int n = dim(rng);
    const int k = std::uniform_int_distribution<int>(1, n)(rng);
    const Spectrum lam = detail::uniform_spectrum(rng, n, -3.0, 3.0);
    const double scale = detail::abs_scale(lam, k);
    const double sk = elem_sym(lam, k);
    const double skm1 = elem_sym(lam, k - 1);
    const auto row = sigma_km1_row(lam, k);

    double worst = 0.0;
    double row_sum = 0.0;
    double euler = 0.0;
    for (int i = 0; i < n; ++i) {
      const double ri = row[static_cast<std::size_t>(i)];
      const double del_k = k <= n - 1 ? elem_sym_deleted(lam, k, {i}) : 0.0;
      worst = std::max(worst, std::abs(sk - (del_k + lam[i] * ri)) / scale);
      row_sum += ri;
      euler += ri * lam[i];
    }
    worst = std::max(worst, std::abs(row_sum - (n - k + 1) * skm1) / (n * detail::abs_scale(lam, k - 1)));
    worst = std::max(worst, std::abs(euler - k * sk) / (n * scale));

    const double e = shift(rng);
    const Spectrum moved = lam.shifted(e);
    std::vector<double> widened(lam.begin(), lam.end());
    for (auto& x : widened) x = std::abs(x) + std::abs(e);
    const double shift_scale = detail::abs_scale(Spectrum(std::move(widened)), k);
    worst = std::max(worst, std::abs(shift_expand(lam, k, e) - elem_sym(moved, k)) / shift_scale);

    ++r.checked;
    r.worst = std::max(r.worst, worst);
    if (worst > rel_tol) detail::record_failure(r, {{"n", n}, {"k", k}, {"lambda", lam.vector()}, {"shift", e}, {"rel_err", worst}});
  }
  return r;
}

/// Perturbed P2 points: p2_example(k,n) with a random positive diagonal
/// scaling, projected back to sigma_k = 0 by scaling the negative entry.
/// Checks that the point is in P2 and min_i sigma_{k-1;i} > 0.
inline VerifyResult verify_p2_ellipticity(long samples, std::uint64_t seed) {
  VerifyResult r;
  r.suite = "p2-ellipticity";
  r.worst = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> factor(0.25, 4.0);
  std::uniform_int_distribution<int> dim(3, 6);
  for (long s = 0; s < samples; ++s) {
    const int n = dim(rng);
    const int k = std::uniform_int_distribution<int>(2, n - 1)(rng);
    std::vector<double> v = p2_example(k, n).vector();
    for (auto& x : v) x *= factor(rng);
    const std::size_t neg = static_cast<std::size_t>(k);  // position of -1/M

    auto sigma_k_at = [&](double t) {
      std::vector<double> w = v;
      w[neg] *= t;
      return elem_sym(Spectrum(std::move(w)), k);
    };
    double hi = 2.0;
    while (sigma_k_at(hi) > 0.0) hi *= 2.0;
    boost::uintmax_t iters = 200;
    const auto bracket = boost::math::tools::toms748_solve(sigma_k_at, 0.0, hi, sigma_k_at(0.0), sigma_k_at(hi),
                                                           boost::math::tools::eps_tolerance<double>(52), iters);
    v[neg] *= 0.5 * (bracket.first + bracket.second);
    const Spectrum lam(std::move(v));

    ++r.checked;
    const auto verdict = classify_boundary(lam, k);
    const auto row = sigma_km1_row(lam, k);
    const double row_min = *std::min_element(row.begin(), row.end());
    r.worst = std::min(r.worst, row_min);
    if (verdict.kind != ConeKind::BoundaryP2 || !(row_min > 0.0))
      detail::record_failure(r, {{"n", n}, {"k", k}, {"lambda", lam.vector()}, {"kind", to_string(verdict.kind)}, {"row_min", row_min}});
  }
  return r;
}

inline const std::vector<std::string>& verify_suites() {
  static const std::vector<std::string> names = {"cone-equivalence", "maclaurin", "garding-inequality", "identities",
                                                 "p2-ellipticity"};
  return names;
}

inline VerifyResult run_verify_suite(const std::string& suite, long samples, std::uint64_t seed) {
  if (samples < 1) throw DomainError("verify: samples must be positive");
  if (suite == "cone-equivalence") return verify_cone_equivalence(samples, seed);
  if (suite == "maclaurin") return verify_maclaurin(samples, seed);
  if (suite == "garding-inequality") return verify_garding_inequality(samples, seed);
  if (suite == "identities") return verify_identities(samples, seed);
  if (suite == "p2-ellipticity") return verify_p2_ellipticity(samples, seed);
  throw DomainError("verify: unknown suite " + suite);
}

}  // namespace khessian
