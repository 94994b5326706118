#pragma once

/// Discretisation of the rescaled equation on the cube [-1,1]^n.
///
/// With u(y) = psi(y) + eps' eps^4 w(y / eps^2) and x = y / eps^2 the
/// equation S_k[u] = f becomes G(w) = 0 with
///
///   G(w) = (1/eps') [ S_k(diag(tau) + eps' D^2 w) - f(eps^2 x, eps^4 psi(x) + eps' eps^4 w,
///                                                    eps^2 tau.x + eps' eps^2 Dw) ].
///
/// Derivatives are centred second-order differences, so the assembled
/// linear operator is the exact Jacobian of the discrete G.

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "khessian/errors.hpp"
#include "khessian/grid.hpp"
#include "khessian/minors.hpp"
#include "khessian/rhs.hpp"
#include "khessian/seeds.hpp"
#include "khessian/symfun.hpp"

namespace khessian {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Linearised Dirichlet problem over the interior unknowns.
struct LinearSystem {
  LayoutPtr layout;
  SparseMatrix matrix;
  Eigen::VectorXd rhs;                 // g = -G(w) on the interior unknowns
  std::vector<double> margin;          // per unknown: min_i (S^ii - sum_{j != i} |S^ij|)
  std::vector<double> margin_excess;   // per unknown: min_i (row margin_i - sigma_{k-1;i}(tau) / 2)
  std::vector<double> row_threshold;   // sigma_{k-1;i}(tau) / 2
  double min_margin = 0.0;
  double min_margin_excess = 0.0;
  double rounding_floor = 0.0;         // estimated floating-point floor of |G| in the max norm
};

struct LinearSolveResult {
  ScalarGrid rho;
  double relative_residual = 0.0;      // ||A rho - g||_2 / ||g||_2
  double residual_inf = 0.0;           // ||A rho - g||_inf
  int iterations = 0;
  std::string method;                  // "zero", "bicgstab", "sparse-lu"
  std::vector<double> history;         // Krylov relative residuals
};

namespace detail {

struct PointArgs {
  SmallMatrix r;
  std::array<double, kMaxDim> y{};
  double u = 0.0;
  std::array<double, kMaxDim> p{};
};

// Matrix argument and f arguments at grid point `pt`.
inline PointArgs point_args(const ScalarGrid& w, const HessianField& d, const SeedQuadratic& seed, std::size_t pt) {
  const GridLayout& g = w.layout();
  const int n = g.dim();
  const double e2 = seed.eps * seed.eps;
  const double e4 = e2 * e2;
  const double ep = seed.eps_prime;
  PointArgs a;
  a.r = SmallMatrix(n);
  double psi = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = g.coord(pt, i);
    psi += 0.5 * seed.tau[i] * x * x;
    a.y[static_cast<std::size_t>(i)] = e2 * x;
    a.p[static_cast<std::size_t>(i)] = e2 * seed.tau[i] * x + ep * e2 * d.grad(pt, i);
    for (int j = 0; j < n; ++j) a.r(i, j) = (i == j ? seed.tau[i] : 0.0) + ep * d.hess(pt, i, j);
  }
  a.u = e4 * psi + ep * e4 * w[pt];
  return a;
}

inline void check_compatible(const ScalarGrid& w, const SeedQuadratic& seed, int f_dim) {
  if (w.layout().dim() != seed.n || seed.tau.size() != seed.n || f_dim != seed.n)
    throw DomainError("pde: grid, seed and right-hand side dimensions differ");
  if (seed.k < 1 || seed.k > seed.n) throw DomainError("pde: need 1 <= k <= n");
  if (!w.respects_dirichlet()) throw DomainError("pde: w must vanish on the boundary");
}

}  // namespace detail

/// G(w) at interior points; boundary entries are zero.
template <RhsFunction F>
ScalarGrid eval_G(const ScalarGrid& w, const SeedQuadratic& seed, const F& f) {
  detail::check_compatible(w, seed, f.dim());
  const GridLayout& g = w.layout();
  const int n = g.dim();
  const HessianField d = hessian_of(w);
  ScalarGrid out(w.layout_ptr());
  for (std::size_t pt : g.interior()) {
    const auto a = detail::point_args(w, d, seed, pt);
    const double fv = f.value(std::span<const double>(a.y.data(), static_cast<std::size_t>(n)), a.u,
                              std::span<const double>(a.p.data(), static_cast<std::size_t>(n)));
    out[pt] = (sk_of_matrix(a.r, seed.k) - fv) / seed.eps_prime;
  }
  return out;
}

/// Jacobian L_G(w) with right-hand side -G(w).
///
/// Second-order coefficients are dS_k/dr_ij at r(w); first-order coefficients
/// -eps^2 df/dp_i and the zeroth-order coefficient -eps^4 df/du. Throws
/// EllipticityError when some row of (S^ij) is not strictly diagonally
/// dominant.
template <RhsFunction F>
LinearSystem assemble_linearized(const ScalarGrid& w, const SeedQuadratic& seed, const F& f) {
  detail::check_compatible(w, seed, f.dim());
  const GridLayout& g = w.layout();
  const int n = g.dim();
  const int k = seed.k;
  const double h = g.spacing();
  const double e2 = seed.eps * seed.eps;
  const double e4 = e2 * e2;
  const double ep = seed.eps_prime;
  const double eps_mach = std::numeric_limits<double>::epsilon();
  const HessianField d = hessian_of(w);
  const double wmax = w.max_abs();

  LinearSystem sys;
  sys.layout = w.layout_ptr();
  const auto N = static_cast<Eigen::Index>(g.unknowns());
  sys.rhs.resize(N);
  sys.margin.resize(g.unknowns());
  sys.margin_excess.resize(g.unknowns());
  const auto tau_row = sigma_km1_row(seed.tau, k);
  for (double v : tau_row) sys.row_threshold.push_back(0.5 * v);
  sys.min_margin = std::numeric_limits<double>::infinity();
  sys.min_margin_excess = std::numeric_limits<double>::infinity();

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(g.unknowns() * static_cast<std::size_t>(1 + 2 * n + 2 * n * (n - 1)));
  auto add = [&](long row, std::size_t pt, double v) {
    const long col = g.unknown_of(pt);
    if (col >= 0 && v != 0.0) trip.emplace_back(row, col, v);
  };

  double floor = 0.0;
  for (std::size_t pt : g.interior()) {
    const long row = g.unknown_of(pt);
    const auto a = detail::point_args(w, d, seed, pt);
    const auto jet = f.jet(std::span<const double>(a.y.data(), static_cast<std::size_t>(n)), a.u,
                           std::span<const double>(a.p.data(), static_cast<std::size_t>(n)));
    const double sk = sk_of_matrix(a.r, k);
    const SmallMatrix grad = sk_gradient(a.r, k);
    sys.rhs[row] = -(sk - jet.value) / ep;

    double margin = std::numeric_limits<double>::infinity();
    double excess = std::numeric_limits<double>::infinity();
    double abs_sum = 0.0;
    for (int i = 0; i < n; ++i) {
      double off = 0.0;
      for (int j = 0; j < n; ++j) {
        abs_sum += std::abs(grad(i, j));
        if (j != i) off += std::abs(grad(i, j));
      }
      const double mi = grad(i, i) - off;
      margin = std::min(margin, mi);
      excess = std::min(excess, mi - sys.row_threshold[static_cast<std::size_t>(i)]);
      if (!(mi > 0.0))
        throw EllipticityError("assemble_linearized: diagonal dominance lost", pt, i, mi);
    }
    sys.margin[static_cast<std::size_t>(row)] = margin;
    sys.margin_excess[static_cast<std::size_t>(row)] = excess;
    sys.min_margin = std::min(sys.min_margin, margin);
    sys.min_margin_excess = std::min(sys.min_margin_excess, excess);
    floor = std::max(floor, eps_mach * ((std::abs(sk) + std::abs(jet.value)) / ep + 4.0 * wmax / (h * h) * abs_sum));

    const auto base = static_cast<std::ptrdiff_t>(pt);
    auto at = [&](int ax, int sa, int bx = -1, int sb = 0) {
      std::ptrdiff_t q = base + detail::shift(g, ax, sa);
      if (bx >= 0) q += detail::shift(g, bx, sb);
      return static_cast<std::size_t>(q);
    };

    double centre = -e4 * jet.du();
    for (int i = 0; i < n; ++i) {
      const double c2 = grad(i, i) / (h * h);
      const double c1 = -e2 * jet.dp(i) / (2.0 * h);
      centre -= 2.0 * c2;
      add(row, at(i, 1), c2 + c1);
      add(row, at(i, -1), c2 - c1);
      for (int j = i + 1; j < n; ++j) {
        const double cm = (grad(i, j) + grad(j, i)) / (4.0 * h * h);
        add(row, at(i, 1, j, 1), cm);
        add(row, at(i, 1, j, -1), -cm);
        add(row, at(i, -1, j, 1), -cm);
        add(row, at(i, -1, j, -1), cm);
      }
    }
    add(row, pt, centre);
  }
  sys.rounding_floor = floor;

  sys.matrix.resize(N, N);
  sys.matrix.setFromTriplets(trip.begin(), trip.end());
  sys.matrix.makeCompressed();
  return sys;
}

namespace detail {

inline ScalarGrid scatter(const LayoutPtr& layout, const Eigen::VectorXd& x) {
  ScalarGrid out(layout);
  const auto& interior = layout->interior();
  for (std::size_t u = 0; u < interior.size(); ++u) out[interior[u]] = x[static_cast<Eigen::Index>(u)];
  return out;
}

// Jacobi-preconditioned BiCGSTAB; returns true on convergence.
inline bool bicgstab(const SparseMatrix& A, const Eigen::VectorXd& b, Eigen::VectorXd& x, double tol, int max_iter,
                     std::vector<double>& history, int& iterations) {
  const Eigen::Index N = b.size();
  Eigen::VectorXd inv_diag(N);
  for (Eigen::Index i = 0; i < N; ++i) {
    const double dv = A.coeff(i, i);
    inv_diag[i] = dv != 0.0 ? 1.0 / dv : 1.0;
  }
  const double bnorm = b.norm();
  x.setZero(N);
  Eigen::VectorXd r = b;
  Eigen::VectorXd r_hat = r;
  Eigen::VectorXd p = Eigen::VectorXd::Zero(N);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(N);
  double rho = 1.0;
  double alpha = 1.0;
  double omega = 1.0;
  iterations = 0;
  for (int it = 0; it < max_iter; ++it) {
    iterations = it + 1;
    double rho_new = r_hat.dot(r);
    if (std::abs(rho_new) < 1e-30 * r.norm() * r_hat.norm()) {
      // breakdown: restart the shadow residual
      r_hat = r;
      rho_new = r.squaredNorm();
      p.setZero();
      v.setZero();
      rho = alpha = omega = 1.0;
    }
    const double beta = (rho_new / rho) * (alpha / omega);
    p = r + beta * (p - omega * v);
    const Eigen::VectorXd y = inv_diag.cwiseProduct(p);
    v = A * y;
    alpha = rho_new / r_hat.dot(v);
    const Eigen::VectorXd s = r - alpha * v;
    if (s.norm() <= tol * bnorm) {
      x += alpha * y;
      history.push_back(s.norm() / bnorm);
      return true;
    }
    const Eigen::VectorXd z = inv_diag.cwiseProduct(s);
    const Eigen::VectorXd t = A * z;
    const double tt = t.squaredNorm();
    omega = tt > 0.0 ? t.dot(s) / tt : 0.0;
    x += alpha * y + omega * z;
    r = s - omega * t;
    rho = rho_new;
    const double rel = r.norm() / bnorm;
    history.push_back(rel);
    if (!std::isfinite(rel)) return false;
    if (rel <= tol) return true;
    if (omega == 0.0) return false;
  }
  return false;
}

}  // namespace detail

/// Solve L rho = g with rho = 0 on the boundary to relative residual tol_lin.
/// BiCGSTAB first; a sparse LU factorisation is the fallback for systems up
/// to 20000 unknowns.
inline LinearSolveResult solve_dirichlet(const LinearSystem& sys, double tol_lin = 1e-10, int max_iter = 0) {
  if (!(tol_lin > 0.0)) throw DomainError("solve_dirichlet: tol_lin must be positive");
  if (!(sys.min_margin > 0.0)) throw DomainError("solve_dirichlet: dominance margins must be positive");
  const Eigen::Index N = sys.rhs.size();
  if (max_iter <= 0) max_iter = static_cast<int>(10 * N);

  LinearSolveResult out;
  const double bnorm = sys.rhs.norm();
  if (bnorm == 0.0) {
    out.rho = ScalarGrid(sys.layout);
    out.method = "zero";
    return out;
  }

  Eigen::VectorXd x;
  const bool ok = detail::bicgstab(sys.matrix, sys.rhs, x, tol_lin, max_iter, out.history, out.iterations);
  Eigen::VectorXd res = sys.matrix * x - sys.rhs;
  out.method = "bicgstab";
  if (!ok || res.norm() > tol_lin * bnorm) {
    if (N > 20000) {
      throw SolverError("solve_dirichlet: Krylov iteration stagnated (relative residual " +
                            std::to_string(res.norm() / bnorm) + ")",
                        out.history);
    }
    Eigen::SparseMatrix<double> colmajor = sys.matrix;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(colmajor);
    if (lu.info() != Eigen::Success) throw SolverError("solve_dirichlet: factorisation failed", out.history);
    x = lu.solve(sys.rhs);
    res = sys.matrix * x - sys.rhs;
    out.method = "sparse-lu";
    if (!(res.norm() <= tol_lin * bnorm))
      throw SolverError("solve_dirichlet: direct solve missed the residual target", out.history);
  }
  out.relative_residual = res.norm() / bnorm;
  out.residual_inf = res.lpNorm<Eigen::Infinity>();
  out.rho = detail::scatter(sys.layout, x);
  return out;
}

/// Apply the assembled operator to a grid function (boundary values ignored).
inline ScalarGrid apply_operator(const LinearSystem& sys, const ScalarGrid& rho) {
  const auto& interior = sys.layout->interior();
  Eigen::VectorXd x(static_cast<Eigen::Index>(interior.size()));
  for (std::size_t u = 0; u < interior.size(); ++u) x[static_cast<Eigen::Index>(u)] = rho[interior[u]];
  return detail::scatter(sys.layout, sys.matrix * x);
}

}  // namespace khessian
