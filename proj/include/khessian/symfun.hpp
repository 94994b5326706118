#pragma once

/// Elementary symmetric polynomials of a real spectrum and the derived
/// quantities used throughout the library: deleted-variable values, the
/// diagonal-shift expansion, Maclaurin means and the (k-1)-row.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "khessian/errors.hpp"

namespace khessian {

/// Real n-vector of eigenvalue coordinates, n >= 2, all entries finite.
/// No ordering is implied.
class Spectrum {
 public:
  Spectrum() = default;

  explicit Spectrum(std::vector<double> entries) : entries_(std::move(entries)) { validate(); }
  Spectrum(std::initializer_list<double> entries) : entries_(entries) { validate(); }

  int size() const noexcept { return static_cast<int>(entries_.size()); }
  double operator[](int i) const { return entries_[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return entries_[static_cast<std::size_t>(i)]; }

  std::span<const double> values() const noexcept { return entries_; }
  const std::vector<double>& vector() const noexcept { return entries_; }

  auto begin() const noexcept { return entries_.begin(); }
  auto end() const noexcept { return entries_.end(); }

  Spectrum scaled(double s) const {
    auto out = entries_;
    for (auto& v : out) v *= s;
    return Spectrum(std::move(out));
  }

  Spectrum shifted(double eps) const {
    auto out = entries_;
    for (auto& v : out) v += eps;
    return Spectrum(std::move(out));
  }

  Spectrum sorted_descending() const {
    auto out = entries_;
    std::sort(out.begin(), out.end(), [](double a, double b) { return a > b; });
    return Spectrum(std::move(out));
  }

  bool is_sorted_descending() const {
    return std::is_sorted(entries_.begin(), entries_.end(), [](double a, double b) { return a > b; });
  }

  friend bool operator==(const Spectrum&, const Spectrum&) = default;

 private:
  void validate() const {
    if (entries_.size() < 2) throw DomainError("Spectrum needs n >= 2 entries");
    for (double v : entries_)
      if (!std::isfinite(v)) throw DomainError("Spectrum entries must be finite");
  }

  std::vector<double> entries_;
};

/// Values sigma_0..sigma_kmax of one spectrum; sigma[0] == 1.
struct SymValueTable {
  std::vector<double> sigma;

  double operator[](int j) const { return sigma[static_cast<std::size_t>(j)]; }
  int max_order() const noexcept { return static_cast<int>(sigma.size()) - 1; }
};

/// Binomial coefficient in 64-bit integer arithmetic; throws on overflow.
inline std::uint64_t binomial_exact(int n, int k) {
  if (n < 0 || k < 0 || k > n) throw DomainError("binomial: need 0 <= k <= n");
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (int i = 1; i <= k; ++i) {
    const auto num = static_cast<std::uint64_t>(n - k + i);
    // result * num / i is exact at every step since it equals C(n-k+i, i).
    const std::uint64_t g = std::gcd(result, static_cast<std::uint64_t>(i));
    const std::uint64_t reduced = result / g;
    const std::uint64_t den = static_cast<std::uint64_t>(i) / g;
    if (reduced > std::numeric_limits<std::uint64_t>::max() / num)
      throw DomainError("binomial: overflow for n=" + std::to_string(n));
    result = reduced * num / den;
  }
  return result;
}

inline double binomial(int n, int k) { return static_cast<double>(binomial_exact(n, k)); }

namespace detail {

// Coefficients of prod_i (1 + v_i t) truncated at degree kmax, skipping the
// indices flagged in `skip`.
inline std::vector<double> sym_coefficients(std::span<const double> v, int kmax,
                                            std::span<const char> skip = {}) {
  std::vector<double> e(static_cast<std::size_t>(kmax) + 1, 0.0);
  e[0] = 1.0;
  int used = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!skip.empty() && skip[i]) continue;
    ++used;
    const int top = std::min(used, kmax);
    for (int j = top; j >= 1; --j) e[static_cast<std::size_t>(j)] += v[i] * e[static_cast<std::size_t>(j - 1)];
  }
  return e;
}

inline void check_order(int k, int n, const char* what) {
  if (k < 0 || k > n) throw DomainError(std::string(what) + ": order k out of range [0, n]");
}

}  // namespace detail

/// sigma_k(lambda) by coefficient accumulation of prod(1 + lambda_i t), O(n k).
inline double elem_sym(const Spectrum& lam, int k) {
  detail::check_order(k, lam.size(), "elem_sym");
  return detail::sym_coefficients(lam.values(), k)[static_cast<std::size_t>(k)];
}

/// sigma_0..sigma_kmax in one pass.
inline SymValueTable elem_sym_all(const Spectrum& lam, int kmax) {
  detail::check_order(kmax, lam.size(), "elem_sym_all");
  return SymValueTable{detail::sym_coefficients(lam.values(), kmax)};
}

/// sigma_k of lambda with the entries at `deleted` (0-based) removed.
inline double elem_sym_deleted(const Spectrum& lam, int k, std::span<const int> deleted) {
  const int n = lam.size();
  std::vector<char> skip(static_cast<std::size_t>(n), 0);
  for (int idx : deleted) {
    if (idx < 0 || idx >= n) throw DomainError("elem_sym_deleted: index out of range");
    if (skip[static_cast<std::size_t>(idx)]) throw DomainError("elem_sym_deleted: duplicate index");
    skip[static_cast<std::size_t>(idx)] = 1;
  }
  detail::check_order(k, n - static_cast<int>(deleted.size()), "elem_sym_deleted");
  return detail::sym_coefficients(lam.values(), k, skip)[static_cast<std::size_t>(k)];
}

inline double elem_sym_deleted(const Spectrum& lam, int k, std::initializer_list<int> deleted) {
  return elem_sym_deleted(lam, k, std::span<const int>(deleted.begin(), deleted.size()));
}

/// Coefficient C(j,k,n) = C(n,k) C(k,j) / C(n,k-j) of the diagonal shift
/// expansion; equals C(n-k+j, j).
inline double shift_coefficient(int j, int k, int n) {
  if (k < 0 || k > n || j < 0 || j > k) throw DomainError("shift_coefficient: need 0 <= j <= k <= n");
  return binomial(n - k + j, j);
}

/// sigma_k(lambda + eps e) through sum_j C(j,k,n) eps^j sigma_{k-j}(lambda).
inline double shift_expand(const Spectrum& lam, int k, double eps) {
  const int n = lam.size();
  detail::check_order(k, n, "shift_expand");
  const auto sig = detail::sym_coefficients(lam.values(), k);
  // Horner in eps.
  double acc = 0.0;
  for (int j = k; j >= 0; --j) acc = acc * eps + shift_coefficient(j, k, n) * sig[static_cast<std::size_t>(k - j)];
  return acc;
}

/// [sigma_l(lambda) / C(n,l)]^(1/l). Negative sigma_l is a domain error.
inline double maclaurin_mean(const Spectrum& lam, int l) {
  const int n = lam.size();
  if (l < 1 || l > n) throw DomainError("maclaurin_mean: need 1 <= l <= n");
  const double s = elem_sym(lam, l);
  if (s < 0.0) throw DomainError("maclaurin_mean: sigma_l < 0, spectrum outside the cone");
  return std::pow(s / binomial(n, l), 1.0 / l);
}

/// (sigma_{k-1;1}, ..., sigma_{k-1;n}): the diagonal coefficients of the
/// linearization of sigma_k at lambda.
inline std::vector<double> sigma_km1_row(const Spectrum& lam, int k) {
  const int n = lam.size();
  if (k < 1 || k > n) throw DomainError("sigma_km1_row: need 1 <= k <= n");
  std::vector<double> row(static_cast<std::size_t>(n));
  std::vector<char> skip(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    skip[static_cast<std::size_t>(i)] = 1;
    row[static_cast<std::size_t>(i)] = detail::sym_coefficients(lam.values(), k - 1, skip)[static_cast<std::size_t>(k - 1)];
    skip[static_cast<std::size_t>(i)] = 0;
  }
  return row;
}

}  // namespace khessian
