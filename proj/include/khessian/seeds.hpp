#pragma once

/// Quadratic seeds psi(y) = 1/2 sum tau_i y_i^2 with sigma_k(tau) = c and a
/// uniformly elliptic linearization, for every sign of c.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "khessian/cone.hpp"
#include "khessian/errors.hpp"
#include "khessian/symfun.hpp"

namespace khessian {

struct SeedQuadratic {
  Spectrum tau;
  int k = 0;
  int n = 0;
  double c = 0.0;
  double alpha = 0.5;
  double eps = 0.5;
  double eps_prime = 0.0;
  int convexity_class = 0;
  std::string construction;  // "p2", "equal-entry", "lift", "negative"
  // Lift data (negative and level-l positive seeds): lambda' before scaling.
  std::vector<double> lift_delta;
  double lift_t = 0.0;
  double lift_scale = 1.0;
};

struct SeedCertificate {
  double ellipticity_margin = 0.0;
  int convexity_class = 0;
  std::optional<int> not_class;
};

/// eps' = eps^alpha for alpha <= 1/2, eps otherwise.
inline double eps_prime_for(double eps, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("eps_prime_for: alpha must lie in (0,1)");
  if (!(eps > 0.0)) throw DomainError("eps_prime_for: eps must be positive");
  return alpha <= 0.5 ? std::pow(eps, alpha) : eps;
}

/// Largest m with sigma_j(tau) > tol for all j <= m (tau in the open cone Gamma_m).
inline int convexity_class_of(const Spectrum& tau, double tol = kConeTol) {
  const auto s = elem_sym_all(tau, tau.size());
  int m = 0;
  while (m < tau.size() && s[m + 1] > tol) ++m;
  return m;
}

/// Smallest m with sigma_m(tau) < -tol, if any.
inline std::optional<int> not_class_of(const Spectrum& tau, double tol = kConeTol) {
  const auto s = elem_sym_all(tau, tau.size());
  for (int m = 1; m <= tau.size(); ++m)
    if (s[m] < -tol) return m;
  return std::nullopt;
}

namespace detail {

// (1,..,1, M, -1/M, 0,..,0) with k-1 leading ones and M - 1/M = k - 1.
// Valid for 1 <= k < n; at k = 1 it reduces to (1, -1, 0, ...).
inline Spectrum p2_point(int k, int n) {
  if (k < 1 || k >= n) throw DomainError("p2 point: need 1 <= k < n (P2 is empty for k = n)");
  const double km1 = k - 1.0;
  const double big = (km1 + std::sqrt(km1 * km1 + 4.0)) / 2.0;
  std::vector<double> v(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < k - 1; ++i) v[static_cast<std::size_t>(i)] = 1.0;
  v[static_cast<std::size_t>(k - 1)] = big;
  v[static_cast<std::size_t>(k)] = -1.0 / big;
  return Spectrum(std::move(v));
}

struct Lift {
  Spectrum lambda;  // sorted descending, in Gamma_{level-1}(n), sigma_level < 0
  std::vector<double> delta;
  double t = 0.0;
};

// Point of Gamma_{level-1}(n) with sigma_level < 0, built from a P2 point of
// Gamma_{level-1}(n-1): prepend delta_2 + 1 and shift the rest by the
// largest t in {1/2, 1/4, ...} satisfying both strict inequalities.
// For level = n no such P2 point exists and (1,..,1,-t) is used instead.
inline Lift lift_to_level(int level, int n) {
  if (level < 2 || level > n) throw DomainError("lift: need 2 <= level <= n");
  constexpr int kMaxHalvings = 200;
  Lift out;
  double t = 0.5;
  if (level == n) {
    for (int step = 0; step < kMaxHalvings; ++step, t *= 0.5) {
      std::vector<double> v(static_cast<std::size_t>(n), 1.0);
      v.back() = -t;
      Spectrum lam(v);
      const auto s = elem_sym_all(lam, n);
      if (s[n - 1] > 0.0 && s[n] < 0.0 && in_gamma_k(lam, n - 1)) {
        out.lambda = lam;
        out.t = t;
        return out;
      }
    }
    throw ConstructionError("lift: no admissible t found at level n");
  }

  const Spectrum delta = p2_point(level - 1, n - 1).sorted_descending();
  out.delta = delta.vector();
  const double head = delta[0] + 1.0;
  for (int step = 0; step < kMaxHalvings; ++step, t *= 0.5) {
    const Spectrum rest = delta.shifted(t);
    const double s_lm1 = elem_sym(rest, level - 1);
    const double s_l = elem_sym(rest, level);
    if (s_lm1 > 0.0 && head * s_lm1 + s_l < 0.0) {
      std::vector<double> v;
      v.reserve(static_cast<std::size_t>(n));
      v.push_back(head);
      v.insert(v.end(), rest.begin(), rest.end());
      out.lambda = Spectrum(std::move(v));
      out.t = t;
      return out;
    }
  }
  throw ConstructionError("lift: no admissible t found in 200 halvings");
}

inline void check_seed_value(const Spectrum& tau, int k, double c) {
  const double got = elem_sym(tau, k);
  if (std::abs(got - c) > 1e-10 * std::max(1.0, std::abs(c)))
    throw ConstructionError("seed: sigma_k(tau) misses the target value");
}

inline void check_seed_row(const Spectrum& tau, int k) {
  const auto row = sigma_km1_row(tau, k);
  if (!(*std::min_element(row.begin(), row.end()) > 0.0))
    throw ConstructionError("seed: linearization is not uniformly elliptic");
}

inline SeedQuadratic make_seed(Spectrum tau, int k, double c, double alpha, double eps, std::string how) {
  SeedQuadratic seed;
  seed.n = tau.size();
  seed.k = k;
  seed.c = c;
  seed.alpha = alpha;
  seed.eps = eps;
  seed.eps_prime = eps_prime_for(eps, alpha);
  seed.convexity_class = convexity_class_of(tau);
  seed.construction = std::move(how);
  seed.tau = std::move(tau);
  return seed;
}

}  // namespace detail

/// Explicit point of P2: sigma_j > 0 (j < k), sigma_k = 0, sigma_{k+1} = -1.
inline Spectrum p2_example(int k, int n) {
  if (k < 2 || k >= n) throw DomainError("p2_example: need 2 <= k < n (P2 is empty for k = n)");
  Spectrum lam = detail::p2_point(k, n);
  const auto s = elem_sym_all(lam, k + 1);
  for (int j = 1; j < k; ++j)
    if (!(s[j] > 0.0)) throw ConstructionError("p2_example: sigma_j <= 0 below k");
  if (std::abs(s[k]) > 1e-10 || std::abs(s[k + 1] + 1.0) > 1e-10)
    throw ConstructionError("p2_example: boundary identities violated");
  return lam;
}

/// Seed for c = 0: tau is the canonical P2 point.
inline SeedQuadratic seed_for_zero(int k, int n, double alpha = 0.5, double eps = 0.5) {
  if (k < 2 || k > n - 1) throw DomainError("seed_for_zero: need 2 <= k <= n-1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("seed_for_zero: alpha must lie in (0,1)");
  auto seed = detail::make_seed(p2_example(k, n), k, 0.0, alpha, eps, "p2");
  detail::check_seed_row(seed.tau, k);
  return seed;
}

/// Seed for c < 0: tau in Gamma_{k-1}(n), sigma_k(tau) = c, descending, with
/// 0 < sigma_{k-1;1} <= ... <= sigma_{k-1;n}.
inline SeedQuadratic seed_for_negative(int k, int n, double c, double alpha = 0.5, double eps = 0.5) {
  if (!(c < 0.0)) throw DomainError("seed_for_negative: need c < 0");
  if (n < 3 || k < 2 || k > n - 1) throw DomainError("seed_for_negative: need n >= 3 and 2 <= k <= n-1");
  const auto lift = detail::lift_to_level(k, n);
  const double base = elem_sym(lift.lambda, k);
  if (!(base < 0.0) || !in_gamma_k(lift.lambda, k - 1))
    throw ConstructionError("seed_for_negative: lifted point fails its inequalities");
  const double s = std::pow(c / base, 1.0 / k);
  auto seed = detail::make_seed(lift.lambda.scaled(s), k, c, alpha, eps, "negative");
  seed.lift_delta = lift.delta;
  seed.lift_t = lift.t;
  seed.lift_scale = s;

  detail::check_seed_value(seed.tau, k, c);
  detail::check_seed_row(seed.tau, k);
  const auto row = sigma_km1_row(seed.tau, k);
  const bool ordered = std::is_sorted(row.begin(), row.end(), [](double a, double b) { return a < b * (1.0 - 1e-12); });
  if (!seed.tau.is_sorted_descending() || !ordered || !in_gamma_k(seed.tau, k - 1))
    throw ConstructionError("seed_for_negative: ordering of the (k-1)-row violated");
  return seed;
}

/// Seed for c > 0. With 1 <= l <= n-k, tau lies in Gamma_{k+l-1}(n) with
/// sigma_{k+l}(tau) < 0. With l = n-k+1 all entries equal (c / C(n,k))^{1/k}.
inline SeedQuadratic seed_for_positive(int k, int n, double c, int l = 1, double alpha = 0.5, double eps = 0.5) {
  if (!(c > 0.0)) throw DomainError("seed_for_positive: need c > 0");
  if (k < 1 || k > n) throw DomainError("seed_for_positive: need 1 <= k <= n");
  if (l < 1 || l > n - k + 1) throw DomainError("seed_for_positive: need 1 <= l <= n-k+1");

  if (l == n - k + 1) {
    const double v = std::pow(c / binomial(n, k), 1.0 / k);
    auto seed = detail::make_seed(Spectrum(std::vector<double>(static_cast<std::size_t>(n), v)), k, c, alpha, eps,
                                  "equal-entry");
    detail::check_seed_value(seed.tau, k, c);
    return seed;
  }

  const int level = k + l;
  const auto lift = detail::lift_to_level(level, n);
  const double s = std::pow(c / elem_sym(lift.lambda, k), 1.0 / k);
  auto seed = detail::make_seed(lift.lambda.scaled(s), k, c, alpha, eps, "lift");
  seed.lift_delta = lift.delta;
  seed.lift_t = lift.t;
  seed.lift_scale = s;

  detail::check_seed_value(seed.tau, k, c);
  detail::check_seed_row(seed.tau, k);
  if (seed.convexity_class != level - 1 || !(elem_sym(seed.tau, level) < 0.0))
    throw ConstructionError("seed_for_positive: convexity class differs from k+l-1");
  return seed;
}

/// Dispatch on the sign of c; `l` only applies to c > 0.
inline SeedQuadratic seed_for_value(int k, int n, double c, int l = 1, double alpha = 0.5, double eps = 0.5) {
  if (c == 0.0) return seed_for_zero(k, n, alpha, eps);
  if (c < 0.0) return seed_for_negative(k, n, c, alpha, eps);
  return seed_for_positive(k, n, c, l, alpha, eps);
}

inline SeedQuadratic with_epsilon(SeedQuadratic seed, double eps) {
  seed.eps = eps;
  seed.eps_prime = eps_prime_for(eps, seed.alpha);
  return seed;
}

inline SeedCertificate certify_seed(const SeedQuadratic& seed, double tol = kConeTol) {
  SeedCertificate cert;
  const auto row = sigma_km1_row(seed.tau, seed.k);
  cert.ellipticity_margin = *std::min_element(row.begin(), row.end());
  cert.convexity_class = convexity_class_of(seed.tau, tol);
  cert.not_class = not_class_of(seed.tau, tol);
  return cert;
}

}  // namespace khessian
