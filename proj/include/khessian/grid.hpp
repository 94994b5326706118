#pragma once

/// Regular grids over the cube [-1,1]^n, finite-difference derivatives and
/// discrete surrogates of the Hoelder norms.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "khessian/errors.hpp"
#include "khessian/minors.hpp"

namespace khessian {

/// Index bookkeeping for an m^n grid. Linear indices are lexicographic in
/// the grid multi-index with the first axis slowest.
class GridLayout {
 public:
  GridLayout(int n, int m) : n_(n), m_(m) {
    if (n < 2 || n > kMaxDim) throw DomainError("GridLayout: dimension must lie in [2, 4]");
    if (m < 9 || m % 2 == 0) throw DomainError("GridLayout: points per axis must be odd and >= 9");
    if ((n == 3 && m > 65) || (n == 4 && m > 33) || (n == 2 && m > 1025))
      throw DomainError("GridLayout: grid exceeds the supported size");
    h_ = 2.0 / (m - 1);
    size_ = 1;
    for (int d = 0; d < n; ++d) size_ *= static_cast<std::size_t>(m);
    std::size_t s = 1;
    for (int d = n - 1; d >= 0; --d) {
      stride_[static_cast<std::size_t>(d)] = s;
      s *= static_cast<std::size_t>(m);
    }
    boundary_.assign(size_, 0);
    unknown_.assign(size_, -1);
    std::array<int, kMaxDim> idx{};
    for (std::size_t p = 0; p < size_; ++p) {
      decode(p, idx);
      bool edge = false;
      for (int d = 0; d < n; ++d) edge = edge || idx[static_cast<std::size_t>(d)] == 0 || idx[static_cast<std::size_t>(d)] == m - 1;
      boundary_[p] = edge ? 1 : 0;
      if (!edge) {
        unknown_[p] = static_cast<long>(interior_.size());
        interior_.push_back(p);
      }
    }
  }

  int dim() const noexcept { return n_; }
  int points_per_axis() const noexcept { return m_; }
  double spacing() const noexcept { return h_; }
  std::size_t size() const noexcept { return size_; }
  std::size_t stride(int d) const { return stride_[static_cast<std::size_t>(d)]; }

  bool is_boundary(std::size_t p) const { return boundary_[p] != 0; }
  std::span<const char> dirichlet_mask() const noexcept { return boundary_; }
  const std::vector<std::size_t>& interior() const noexcept { return interior_; }
  std::size_t unknowns() const noexcept { return interior_.size(); }
  /// Interior unknown number of grid point p, or -1 on the boundary.
  long unknown_of(std::size_t p) const { return unknown_[p]; }

  void decode(std::size_t p, std::array<int, kMaxDim>& idx) const {
    for (int d = 0; d < n_; ++d) {
      idx[static_cast<std::size_t>(d)] = static_cast<int>(p / stride_[static_cast<std::size_t>(d)]);
      p %= stride_[static_cast<std::size_t>(d)];
    }
  }

  int axis_index(std::size_t p, int d) const {
    return static_cast<int>((p / stride_[static_cast<std::size_t>(d)]) % static_cast<std::size_t>(m_));
  }

  /// Coordinate -1 + i h, computed so that the centre and the ends are exact.
  double coord_of_index(int i) const { return static_cast<double>(2 * i - (m_ - 1)) / static_cast<double>(m_ - 1); }
  double coord(std::size_t p, int d) const { return coord_of_index(axis_index(p, d)); }

  void coords(std::size_t p, std::span<double> out) const {
    for (int d = 0; d < n_; ++d) out[static_cast<std::size_t>(d)] = coord(p, d);
  }

  std::size_t centre() const {
    std::size_t p = 0;
    for (int d = 0; d < n_; ++d) p += static_cast<std::size_t>((m_ - 1) / 2) * stride_[static_cast<std::size_t>(d)];
    return p;
  }

 private:
  int n_;
  int m_;
  double h_ = 0.0;
  std::size_t size_ = 0;
  std::array<std::size_t, kMaxDim> stride_{};
  std::vector<char> boundary_;
  std::vector<long> unknown_;
  std::vector<std::size_t> interior_;
};

using LayoutPtr = std::shared_ptr<const GridLayout>;

inline LayoutPtr make_layout(int n, int m) { return std::make_shared<const GridLayout>(n, m); }

/// Scalar field on a grid.
class ScalarGrid {
 public:
  ScalarGrid() = default;
  explicit ScalarGrid(LayoutPtr layout) : layout_(std::move(layout)), values_(layout_->size(), 0.0) {}
  ScalarGrid(LayoutPtr layout, std::vector<double> values) : layout_(std::move(layout)), values_(std::move(values)) {
    if (values_.size() != layout_->size()) throw DomainError("ScalarGrid: value count does not match the layout");
  }

  template <class Fn>
  static ScalarGrid sample(LayoutPtr layout, Fn&& fn) {
    ScalarGrid g(layout);
    std::array<double, kMaxDim> x{};
    std::span<double> xs(x.data(), static_cast<std::size_t>(layout->dim()));
    for (std::size_t p = 0; p < layout->size(); ++p) {
      layout->coords(p, xs);
      g.values_[p] = fn(std::span<const double>(xs));
    }
    return g;
  }

  const GridLayout& layout() const { return *layout_; }
  const LayoutPtr& layout_ptr() const noexcept { return layout_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t p) const { return values_[p]; }
  double& operator[](std::size_t p) { return values_[p]; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::vector<double>& values() noexcept { return values_; }

  /// Zero every boundary value.
  void apply_dirichlet() {
    for (std::size_t p = 0; p < values_.size(); ++p)
      if (layout_->is_boundary(p)) values_[p] = 0.0;
  }

  bool respects_dirichlet() const {
    for (std::size_t p = 0; p < values_.size(); ++p)
      if (layout_->is_boundary(p) && values_[p] != 0.0) return false;
    return true;
  }

  ScalarGrid& operator+=(const ScalarGrid& other) {
    for (std::size_t p = 0; p < values_.size(); ++p) values_[p] += other.values_[p];
    return *this;
  }

  double max_abs() const {
    double v = 0.0;
    for (double x : values_) v = std::max(v, std::abs(x));
    return v;
  }

 private:
  LayoutPtr layout_;
  std::vector<double> values_;
};

/// Per-point gradient and symmetric Hessian of a scalar grid.
class HessianField {
 public:
  HessianField() = default;
  explicit HessianField(LayoutPtr layout)
      : layout_(std::move(layout)),
        n_(layout_->dim()),
        grad_(layout_->size() * static_cast<std::size_t>(n_), 0.0),
        hess_(layout_->size() * static_cast<std::size_t>(n_ * n_), 0.0) {}

  const GridLayout& layout() const { return *layout_; }
  int dim() const noexcept { return n_; }

  double grad(std::size_t p, int i) const { return grad_[p * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i)]; }
  double& grad(std::size_t p, int i) { return grad_[p * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i)]; }
  double hess(std::size_t p, int i, int j) const { return hess_[index(p, i, j)]; }
  double& hess(std::size_t p, int i, int j) { return hess_[index(p, i, j)]; }

  SmallMatrix hessian_at(std::size_t p) const {
    SmallMatrix r(n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) r(i, j) = hess(p, i, j);
    return r;
  }

 private:
  std::size_t index(std::size_t p, int i, int j) const {
    return p * static_cast<std::size_t>(n_ * n_) + static_cast<std::size_t>(i * n_ + j);
  }

  LayoutPtr layout_;
  int n_ = 0;
  std::vector<double> grad_;
  std::vector<double> hess_;
};

namespace detail {

struct Stencil1D {
  std::array<int, 4> offset{};
  std::array<double, 4> weight{};
  int count = 0;
};

// Second-order first-derivative stencil at axis position i.
inline Stencil1D first_derivative_stencil(int i, int m, double h) {
  Stencil1D s;
  const double c = 1.0 / (2.0 * h);
  if (i > 0 && i < m - 1) {
    s.count = 2;
    s.offset = {-1, 1, 0, 0};
    s.weight = {-c, c, 0, 0};
  } else if (i == 0) {
    s.count = 3;
    s.offset = {0, 1, 2, 0};
    s.weight = {-3 * c, 4 * c, -c, 0};
  } else {
    s.count = 3;
    s.offset = {0, -1, -2, 0};
    s.weight = {3 * c, -4 * c, c, 0};
  }
  return s;
}

// Second-order second-derivative stencil at axis position i.
inline Stencil1D second_derivative_stencil(int i, int m, double h) {
  Stencil1D s;
  const double c = 1.0 / (h * h);
  if (i > 0 && i < m - 1) {
    s.count = 3;
    s.offset = {-1, 0, 1, 0};
    s.weight = {c, -2 * c, c, 0};
  } else if (i == 0) {
    s.count = 4;
    s.offset = {0, 1, 2, 3};
    s.weight = {2 * c, -5 * c, 4 * c, -c};
  } else {
    s.count = 4;
    s.offset = {0, -1, -2, -3};
    s.weight = {2 * c, -5 * c, 4 * c, -c};
  }
  return s;
}

inline std::ptrdiff_t shift(const GridLayout& g, int d, int k) {
  return static_cast<std::ptrdiff_t>(g.stride(d)) * k;
}

}  // namespace detail

/// Gradient and Hessian of w at every grid point: centred differences in the
/// interior, second-order one-sided stencils on the boundary. Mixed partials
/// are products of first-derivative stencils and are stored symmetrically.
inline HessianField hessian_of(const ScalarGrid& w) {
  const GridLayout& g = w.layout();
  const int n = g.dim();
  const int m = g.points_per_axis();
  const double h = g.spacing();
  HessianField out(w.layout_ptr());

  std::vector<detail::Stencil1D> first(static_cast<std::size_t>(m));
  std::vector<detail::Stencil1D> second(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    first[static_cast<std::size_t>(i)] = detail::first_derivative_stencil(i, m, h);
    second[static_cast<std::size_t>(i)] = detail::second_derivative_stencil(i, m, h);
  }

  std::array<int, kMaxDim> idx{};
  for (std::size_t p = 0; p < g.size(); ++p) {
    g.decode(p, idx);
    const auto base = static_cast<std::ptrdiff_t>(p);
    for (int a = 0; a < n; ++a) {
      const auto& fa = first[static_cast<std::size_t>(idx[static_cast<std::size_t>(a)])];
      const auto& sa = second[static_cast<std::size_t>(idx[static_cast<std::size_t>(a)])];
      double d1 = 0.0;
      for (int t = 0; t < fa.count; ++t)
        d1 += fa.weight[static_cast<std::size_t>(t)] * w[static_cast<std::size_t>(base + detail::shift(g, a, fa.offset[static_cast<std::size_t>(t)]))];
      out.grad(p, a) = d1;
      double d2 = 0.0;
      for (int t = 0; t < sa.count; ++t)
        d2 += sa.weight[static_cast<std::size_t>(t)] * w[static_cast<std::size_t>(base + detail::shift(g, a, sa.offset[static_cast<std::size_t>(t)]))];
      out.hess(p, a, a) = d2;
      for (int b = a + 1; b < n; ++b) {
        const auto& fb = first[static_cast<std::size_t>(idx[static_cast<std::size_t>(b)])];
        double mixed = 0.0;
        for (int ta = 0; ta < fa.count; ++ta)
          for (int tb = 0; tb < fb.count; ++tb)
            mixed += fa.weight[static_cast<std::size_t>(ta)] * fb.weight[static_cast<std::size_t>(tb)] *
                     w[static_cast<std::size_t>(base + detail::shift(g, a, fa.offset[static_cast<std::size_t>(ta)]) +
                                                detail::shift(g, b, fb.offset[static_cast<std::size_t>(tb)]))];
        out.hess(p, a, b) = mixed;
        out.hess(p, b, a) = mixed;
      }
    }
  }
  return out;
}

inline constexpr int kHolderRadius = 8;

/// Largest |v(q) - v(p)| / |q - p|^alpha over pairs at distance <= radius*h
/// along the axis and the two-axis diagonal directions. With interior_only
/// both points must be interior.
template <class Value>
double holder_quotient(const GridLayout& g, Value&& value, double alpha, bool interior_only,
                       int radius = kHolderRadius) {
  const int n = g.dim();
  const int m = g.points_per_axis();
  const double h = g.spacing();
  struct Direction {
    std::array<int, kMaxDim> v{};
    double length = 1.0;
  };
  std::vector<Direction> dirs;
  for (int a = 0; a < n; ++a) {
    Direction d;
    d.v[static_cast<std::size_t>(a)] = 1;
    dirs.push_back(d);
  }
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int sgn : {1, -1}) {
        Direction d;
        d.v[static_cast<std::size_t>(a)] = 1;
        d.v[static_cast<std::size_t>(b)] = sgn;
        d.length = std::sqrt(2.0);
        dirs.push_back(d);
      }

  const int lo = interior_only ? 1 : 0;
  const int hi = interior_only ? m - 2 : m - 1;
  double best = 0.0;
  std::array<int, kMaxDim> idx{};
  for (std::size_t p = 0; p < g.size(); ++p) {
    if (interior_only && g.is_boundary(p)) continue;
    g.decode(p, idx);
    const double vp = value(p);
    for (const auto& dir : dirs) {
      const int steps = static_cast<int>(std::floor(radius / dir.length + 1e-12));
      for (int s = 1; s <= steps; ++s) {
        bool inside = true;
        std::ptrdiff_t off = 0;
        for (int d = 0; d < n; ++d) {
          const int q = idx[static_cast<std::size_t>(d)] + s * dir.v[static_cast<std::size_t>(d)];
          if (q < lo || q > hi) {
            inside = false;
            break;
          }
          off += detail::shift(g, d, s * dir.v[static_cast<std::size_t>(d)]);
        }
        if (!inside) break;
        const double dist = s * dir.length * h;
        const double diff = std::abs(value(static_cast<std::size_t>(static_cast<std::ptrdiff_t>(p) + off)) - vp);
        best = std::max(best, diff / std::pow(dist, alpha));
      }
    }
  }
  return best;
}

/// Discrete C^{2,alpha} surrogate: sup|w| + sup|Dw| + sup|D^2 w| + Hoelder quotient of D^2 w.
struct C2AlphaNorm {
  double sup = 0.0;
  double grad = 0.0;
  double hess = 0.0;
  double holder = 0.0;
  double total() const noexcept { return sup + grad + hess + holder; }
};

inline C2AlphaNorm c2alpha_surrogate(const ScalarGrid& w, const HessianField& d, double alpha) {
  const GridLayout& g = w.layout();
  const int n = g.dim();
  C2AlphaNorm out;
  out.sup = w.max_abs();
  for (std::size_t p = 0; p < g.size(); ++p)
    for (int i = 0; i < n; ++i) {
      out.grad = std::max(out.grad, std::abs(d.grad(p, i)));
      for (int j = 0; j < n; ++j) out.hess = std::max(out.hess, std::abs(d.hess(p, i, j)));
    }
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      out.holder = std::max(out.holder, holder_quotient(g, [&](std::size_t p) { return d.hess(p, i, j); }, alpha, false));
  return out;
}

inline C2AlphaNorm c2alpha_surrogate(const ScalarGrid& w, double alpha) { return c2alpha_surrogate(w, hessian_of(w), alpha); }

/// Discrete C^alpha surrogate over interior points: sup|g| + Hoelder quotient.
inline double calpha_surrogate(const ScalarGrid& g, double alpha) {
  const GridLayout& layout = g.layout();
  double sup = 0.0;
  for (std::size_t p : layout.interior()) sup = std::max(sup, std::abs(g[p]));
  return sup + holder_quotient(layout, [&](std::size_t p) { return g[p]; }, alpha, true);
}

}  // namespace khessian
