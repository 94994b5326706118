#pragma once

/// Membership in the Garding cone Gamma_k(n) under its three equivalent
/// definitions, boundary classification into P1 / P2, and the Garding
/// inequality.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "khessian/errors.hpp"
#include "khessian/symfun.hpp"

namespace khessian {

inline constexpr double kConeTol = 1e-9;

enum class ConeKind { Interior, BoundaryP1, BoundaryP2, Outside };

inline std::string to_string(ConeKind kind) {
  switch (kind) {
    case ConeKind::Interior: return "Interior";
    case ConeKind::BoundaryP1: return "BoundaryP1";
    case ConeKind::BoundaryP2: return "BoundaryP2";
    case ConeKind::Outside: return "Outside";
  }
  return "Outside";
}

struct ConeVerdict {
  ConeKind kind = ConeKind::Outside;
  int k = 0;
  double tol = kConeTol;
  SymValueTable sigmas;          // sigma_0 .. sigma_{k+1}
  double margin = 0.0;           // min slack of the winning region; best (negative) slack if Outside
  bool ambiguous = false;        // |margin| < tol / 2
  std::vector<double> km1_row;   // sigma_{k-1;i}
  double km1_row_min = 0.0;
};

inline void check_cone_order(const Spectrum& lam, int k, const char* what) {
  if (k < 1 || k > lam.size()) throw DomainError(std::string(what) + ": need 1 <= k <= n");
}

/// sigma_j(lambda) > tol for every j = 1..k.
inline bool in_gamma_k(const Spectrum& lam, int k, double tol = 0.0) {
  check_cone_order(lam, k, "in_gamma_k");
  if (tol < 0.0) throw DomainError("in_gamma_k: tol must be >= 0");
  const auto s = elem_sym_all(lam, k);
  for (int j = 1; j <= k; ++j)
    if (!(s[j] > tol)) return false;
  return true;
}

/// Hyperbolicity-cone membership: sigma_k(s e + lambda) > 0 for all s >= 0.
///
/// The answer comes from the coefficients C(j,k,n) sigma_{k-j}(lambda) of
/// the polynomial in s. Since sigma_k is hyperbolic in direction e the
/// polynomial is real-rooted, so all roots are negative exactly when every
/// coefficient is positive. A geometric sample of s over [0, root bound] is
/// evaluated as well; a positive coefficient verdict with a nonpositive
/// sample is a logic error.
inline bool in_garding_cone_sampled(const Spectrum& lam, int k, int samples = 32) {
  check_cone_order(lam, k, "in_garding_cone_sampled");
  const int n = lam.size();
  const auto s = elem_sym_all(lam, k);
  std::vector<double> coef(static_cast<std::size_t>(k) + 1);
  for (int j = 0; j <= k; ++j) coef[static_cast<std::size_t>(j)] = shift_coefficient(j, k, n) * s[k - j];

  const bool exact = std::all_of(coef.begin(), coef.end(), [](double c) { return c > 0.0; });

  // Cauchy bound on |root|.
  double bound = 0.0;
  for (int j = 0; j < k; ++j) bound = std::max(bound, std::abs(coef[static_cast<std::size_t>(j)] / coef.back()));
  bound += 1.0;

  bool sampled = true;
  for (int i = 0; i < std::max(samples, 1); ++i) {
    const double t = (i == 0) ? 0.0 : bound * std::pow(2.0, -(samples - 1 - i));
    double p = 0.0;
    for (int j = k; j >= 0; --j) p = p * t + coef[static_cast<std::size_t>(j)];
    if (!(p > 0.0)) {
      sampled = false;
      break;
    }
  }
  if (exact && !sampled) throw std::logic_error("in_garding_cone_sampled: sampled check contradicts coefficient test");
  return exact;
}

/// Deleted-variable positivity: sigma_{k-l; I}(lambda) > 0 for every index
/// set I with |I| = l, l = 0..min(k, n-1).
inline bool in_gamma_tilde(const Spectrum& lam, int k, double max_work = 1e6) {
  check_cone_order(lam, k, "in_gamma_tilde");
  const int n = lam.size();
  const int lmax = std::min(k, n - 1);
  double work = 0.0;
  for (int l = 0; l <= lmax; ++l) work += binomial(n, l);
  if (work > max_work) throw CapacityError("in_gamma_tilde: subset enumeration exceeds work guard");

  std::vector<char> skip(static_cast<std::size_t>(n), 0);
  for (int l = 0; l <= lmax; ++l) {
    // Enumerate l-subsets as bit masks with exactly l bits via prev_permutation.
    std::fill(skip.begin(), skip.end(), 0);
    std::fill(skip.begin(), skip.begin() + l, 1);
    do {
      const double v = detail::sym_coefficients(lam.values(), k - l, skip)[static_cast<std::size_t>(k - l)];
      if (!(v > 0.0)) return false;
    } while (std::prev_permutation(skip.begin(), skip.end()));
  }
  return true;
}

/// Locate lambda relative to Gamma_k(n): interior, the P2 part of the
/// boundary (sigma_k = 0, sigma_{k+1} < 0), the P1 part (sigma_j = 0 for all
/// j >= k), or outside. Requires 1 <= k <= n-1.
inline ConeVerdict classify_boundary(const Spectrum& lam, int k, double tol = kConeTol) {
  const int n = lam.size();
  if (k < 1 || k > n - 1) throw DomainError("classify_boundary: need 1 <= k <= n-1");
  if (tol < 0.0) throw DomainError("classify_boundary: tol must be >= 0");
  const auto s = elem_sym_all(lam, n);

  constexpr double inf = std::numeric_limits<double>::infinity();

  double interior = inf;
  for (int j = 1; j <= k; ++j) interior = std::min(interior, s[j] - tol);

  double p2 = std::min(tol - std::abs(s[k]), -tol - s[k + 1]);
  for (int j = 1; j < k; ++j) p2 = std::min(p2, s[j] - tol);

  double p1 = inf;
  for (int j = 1; j < k; ++j) p1 = std::min(p1, s[j] + tol);
  for (int j = k; j <= n; ++j) p1 = std::min(p1, tol - std::abs(s[j]));

  ConeVerdict v;
  v.k = k;
  v.tol = tol;
  v.sigmas.sigma.assign(s.sigma.begin(), s.sigma.begin() + k + 2);
  v.km1_row = sigma_km1_row(lam, k);
  v.km1_row_min = *std::min_element(v.km1_row.begin(), v.km1_row.end());

  const bool is_interior = interior > 0.0;
  const bool is_p2 = !is_interior && std::abs(s[k]) <= tol && s[k + 1] < -tol && p2 > 0.0;
  const bool is_p1 = !is_interior && !is_p2 && p1 >= 0.0;
  if (is_interior) {
    v.kind = ConeKind::Interior;
    v.margin = interior;
  } else if (is_p2) {
    v.kind = ConeKind::BoundaryP2;
    v.margin = p2;
  } else if (is_p1) {
    v.kind = ConeKind::BoundaryP1;
    v.margin = p1;
  } else {
    v.kind = ConeKind::Outside;
    v.margin = std::max({interior, p1, p2});
  }
  v.ambiguous = std::abs(v.margin) < 0.5 * tol;
  return v;
}

/// Value of sum_i sigma_{k-1;i}(lambda) mu_i - k sigma_k(lambda)^{(k-1)/k} sigma_k(mu)^{1/k}.
/// Both arguments must lie in Gamma_k(n).
inline double garding_slack(const Spectrum& lam, const Spectrum& mu, int k) {
  if (lam.size() != mu.size()) throw DomainError("garding_slack: dimension mismatch");
  if (!in_gamma_k(lam, k) || !in_gamma_k(mu, k)) throw DomainError("garding_slack: arguments must lie in Gamma_k");
  const auto row = sigma_km1_row(lam, k);
  double lhs = 0.0;
  for (int i = 0; i < lam.size(); ++i) lhs += row[static_cast<std::size_t>(i)] * mu[i];
  const double rhs = k * std::pow(elem_sym(lam, k), (k - 1.0) / k) * std::pow(elem_sym(mu, k), 1.0 / k);
  return lhs - rhs;
}

inline bool garding_inequality_check(const Spectrum& lam, const Spectrum& mu, int k, double tol = 1e-10) {
  return garding_slack(lam, mu, k) >= -tol;
}

struct OrderFacts {
  int positive_count = 0;  // p: number of strictly positive entries
  bool row_sorted = false; // sigma_{k-1;i} nondecreasing in i
};

/// For descending lambda in the closure of Gamma_k(n): p >= k and the
/// (k-1)-row is nondecreasing.
inline OrderFacts descending_order_facts(const Spectrum& lam, int k, double tol = kConeTol) {
  check_cone_order(lam, k, "descending_order_facts");
  if (!lam.is_sorted_descending()) throw DomainError("descending_order_facts: spectrum must be sorted descending");
  const auto s = elem_sym_all(lam, k);
  for (int j = 1; j <= k; ++j)
    if (s[j] < -tol) throw DomainError("descending_order_facts: spectrum outside the closed cone");

  OrderFacts facts;
  facts.positive_count = static_cast<int>(std::count_if(lam.begin(), lam.end(), [](double v) { return v > 0.0; }));
  const auto row = sigma_km1_row(lam, k);
  double scale = 1.0;
  for (double r : row) scale = std::max(scale, std::abs(r));
  facts.row_sorted = true;
  for (std::size_t i = 0; i + 1 < row.size(); ++i)
    if (row[i] > row[i + 1] + 1e-12 * scale) facts.row_sorted = false;
  return facts;
}

}  // namespace khessian
