#pragma once

/// S_k of a small matrix as the sum of its principal k-minors, and the
/// entrywise gradient dS_k/dr_ij. Dimensions up to 4.

#include <array>
#include <cstddef>
#include <vector>

#include "khessian/errors.hpp"

namespace khessian {

inline constexpr int kMaxDim = 4;

/// Dense n x n matrix, n <= 4, row-major in a fixed buffer.
class SmallMatrix {
 public:
  SmallMatrix() = default;
  explicit SmallMatrix(int n) : n_(n) {
    if (n < 1 || n > kMaxDim) throw DomainError("SmallMatrix: dimension must lie in [1, 4]");
  }

  static SmallMatrix identity(int n) {
    SmallMatrix m(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static SmallMatrix diagonal(const std::vector<double>& d) {
    SmallMatrix m(static_cast<int>(d.size()));
    for (int i = 0; i < m.n_; ++i) m(i, i) = d[static_cast<std::size_t>(i)];
    return m;
  }

  int dim() const noexcept { return n_; }
  double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i * kMaxDim + j)]; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i * kMaxDim + j)]; }

 private:
  int n_ = 0;
  std::array<double, kMaxDim * kMaxDim> a_{};
};

namespace detail {

// Determinant of the submatrix with the given rows and columns (equal
// counts, at most 4) by Laplace expansion along the first row.
inline double minor_det(const SmallMatrix& r, const int* rows, const int* cols, int size) {
  if (size == 0) return 1.0;
  if (size == 1) return r(rows[0], cols[0]);
  if (size == 2) return r(rows[0], cols[0]) * r(rows[1], cols[1]) - r(rows[0], cols[1]) * r(rows[1], cols[0]);
  double det = 0.0;
  int sub_cols[kMaxDim];
  for (int c = 0; c < size; ++c) {
    int t = 0;
    for (int cc = 0; cc < size; ++cc)
      if (cc != c) sub_cols[t++] = cols[cc];
    const double term = r(rows[0], cols[c]) * minor_det(r, rows + 1, sub_cols, size - 1);
    det += (c % 2 == 0) ? term : -term;
  }
  return det;
}

// Calls fn(indices, k) for every increasing k-subset of {0..n-1}.
template <class Fn>
void for_each_subset(int n, int k, Fn&& fn) {
  int idx[kMaxDim];
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    fn(static_cast<const int*>(idx));
    int pos = k - 1;
    while (pos >= 0 && idx[pos] == n - k + pos) --pos;
    if (pos < 0) return;
    ++idx[pos];
    for (int i = pos + 1; i < k; ++i) idx[i] = idx[i - 1] + 1;
  }
}

inline void check_sk_args(const SmallMatrix& r, int k) {
  if (k < 1 || k > r.dim()) throw DomainError("S_k: need 1 <= k <= n");
}

}  // namespace detail

/// Sum of all principal k x k minors of r.
inline double sk_of_matrix(const SmallMatrix& r, int k) {
  detail::check_sk_args(r, k);
  double sum = 0.0;
  detail::for_each_subset(r.dim(), k, [&](const int* s) { sum += detail::minor_det(r, s, s, k); });
  return sum;
}

/// Matrix of partials dS_k / dr_ij, treating all n^2 entries as independent.
/// Within each principal k-subset containing both i and j the contribution is
/// the (i,j) cofactor of that principal submatrix.
inline SmallMatrix sk_gradient(const SmallMatrix& r, int k) {
  detail::check_sk_args(r, k);
  const int n = r.dim();
  SmallMatrix grad(n);
  detail::for_each_subset(n, k, [&](const int* s) {
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        int rows[kMaxDim];
        int cols[kMaxDim];
        int tr = 0;
        int tc = 0;
        for (int t = 0; t < k; ++t) {
          if (t != a) rows[tr++] = s[t];
          if (t != b) cols[tc++] = s[t];
        }
        const double cof = detail::minor_det(r, rows, cols, k - 1);
        grad(s[a], s[b]) += ((a + b) % 2 == 0) ? cof : -cof;
      }
    }
  });
  return grad;
}

}  // namespace khessian
