#pragma once

/// Newton iteration for G(w) = 0, choice of the scale eps, reconstruction of
/// u in physical variables and its convexity certificate.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "khessian/errors.hpp"
#include "khessian/grid.hpp"
#include "khessian/minors.hpp"
#include "khessian/pde.hpp"
#include "khessian/seeds.hpp"

namespace khessian {

struct GridParams {
  int m = 17;
  double tol_lin = 1e-10;
};

struct NewtonParams {
  double tol_newton = 1e-9;
  int max_iter = 12;
  int max_restarts = 3;
  double w_norm_limit = 1.0;
};

enum class IterationStatus { Converged, EpsilonRetuned, EllipticityLost, MaxIter };

inline std::string to_string(IterationStatus s) {
  switch (s) {
    case IterationStatus::Converged: return "Converged";
    case IterationStatus::EpsilonRetuned: return "EpsilonRetuned";
    case IterationStatus::EllipticityLost: return "EllipticityLost";
    case IterationStatus::MaxIter: return "MaxIter";
  }
  return "MaxIter";
}

struct IterationRecord {
  int m = 0;
  double g_inf = 0.0;
  double g_calpha = 0.0;
  double w_norm = 0.0;            // C^{2,alpha} surrogate of w_m
  double rho_inf = 0.0;
  double rho_norm = 0.0;          // C^{2,alpha} surrogate of rho_m
  double min_margin = 0.0;
  double min_margin_excess = 0.0;
  double lin_residual = 0.0;      // relative 2-norm
  double lin_residual_inf = 0.0;
  int lin_iterations = 0;
  double rounding_floor = 0.0;
  std::optional<double> q;        // ||g_{m+1}|| / ||g_m||^2
  bool q_above_floor = false;
};

struct AttemptRecord {
  double eps = 0.0;
  IterationStatus status = IterationStatus::MaxIter;
  std::string reason;
  int iterations = 0;
};

struct IterationReport {
  std::vector<IterationRecord> records;  // final attempt
  IterationStatus status = IterationStatus::MaxIter;
  bool at_floor = false;
  std::vector<double> eps_history;
  std::vector<AttemptRecord> attempts;
  double eps = 0.0;
  double eps_prime = 0.0;
  double threshold = 0.0;                // min_i sigma_{k-1;i}(tau) / 2
};

struct TuneStep {
  double eps = 0.0;
  double g0_norm = 0.0;
  double rho0_norm = 0.0;
  double c_hat = 0.0;
  double min_margin_excess = 0.0;
  bool passed = false;
  std::string note;
};

struct TuneResult {
  double eps = 0.0;
  double eps_prime = 0.0;
  std::vector<TuneStep> steps;
};

/// One trial of the eps acceptance test: C_hat ||g0|| <= 1/4 with C_hat the
/// observed ratio ||rho0|| / ||g0|| of one linear solve at w = 0, and every
/// dominance margin above half the seed's row value.
template <RhsFunction F>
TuneStep epsilon_trial(const SeedQuadratic& seed_in, const F& f, const GridParams& grid, double eps) {
  TuneStep step;
  step.eps = eps;
  const SeedQuadratic seed = with_epsilon(seed_in, eps);
  const ScalarGrid w0(make_layout(seed.n, grid.m));
  try {
    const LinearSystem sys = assemble_linearized(w0, seed, f);
    step.min_margin_excess = sys.min_margin_excess;
    const ScalarGrid g0 = detail::scatter(sys.layout, sys.rhs);
    step.g0_norm = calpha_surrogate(g0, seed.alpha);
    if (step.g0_norm > 0.0) {
      const auto sol = solve_dirichlet(sys, grid.tol_lin);
      step.rho0_norm = c2alpha_surrogate(sol.rho, seed.alpha).total();
      step.c_hat = step.rho0_norm / step.g0_norm;
    }
    step.passed = step.c_hat * step.g0_norm <= 0.25 && step.min_margin_excess > 0.0;
  } catch (const DomainError& e) {
    step.note = e.what();
  } catch (const EllipticityError& e) {
    step.note = e.what();
  }
  return step;
}

/// Halve eps from eps_start until the trial passes; throws TuningError below 1e-4.
template <RhsFunction F>
TuneResult tune_epsilon(const SeedQuadratic& seed, const F& f, const GridParams& grid, double eps_start = 0.5) {
  TuneResult out;
  for (double eps = eps_start; eps >= 1e-4; eps *= 0.5) {
    auto step = epsilon_trial(seed, f, grid, eps);
    out.steps.push_back(step);
    if (step.passed) {
      out.eps = eps;
      out.eps_prime = eps_prime_for(eps, seed.alpha);
      return out;
    }
  }
  std::string msg = "tune_epsilon: no admissible eps >= 1e-4;";
  for (const auto& s : out.steps)
    msg += " [eps=" + std::to_string(s.eps) + " g0=" + std::to_string(s.g0_norm) + " rho0=" + std::to_string(s.rho0_norm) + "]";
  throw TuningError(msg);
}

struct NewtonResult {
  ScalarGrid w;
  IterationReport report;
  SeedQuadratic seed;  // with the eps finally used
};

namespace detail {

struct AttemptFailure {
  IterationStatus status;
  std::string reason;
};

// Mark quadratic-decay ratios measured above the floor set by the linear
// solve residual and rounding.
inline void fill_decay_ratios(std::vector<IterationRecord>& recs) {
  for (std::size_t i = 0; i + 1 < recs.size(); ++i) {
    auto& r = recs[i];
    const auto& next = recs[i + 1];
    if (r.g_inf <= 0.0) continue;
    r.q = next.g_inf / (r.g_inf * r.g_inf);
    r.q_above_floor = next.g_inf >= 10.0 * (r.lin_residual_inf + next.rounding_floor);
  }
}

}  // namespace detail

/// Newton iteration w_{m+1} = w_m + rho_m with L_G(w_m) rho_m = -G(w_m),
/// rho_m = 0 on the boundary, starting at w_0 = 0. Loss of diagonal
/// dominance, a box violation of f or ||w_m|| above the limit halves eps and
/// restarts, at most max_restarts times.
template <RhsFunction F>
NewtonResult newton_loop(const SeedQuadratic& seed_in, const F& f, const GridParams& grid, const NewtonParams& params) {
  NewtonResult out;
  out.seed = seed_in;
  const auto layout = make_layout(seed_in.n, grid.m);
  const auto row = sigma_km1_row(seed_in.tau, seed_in.k);
  out.report.threshold = 0.5 * *std::min_element(row.begin(), row.end());

  for (int attempt = 0; attempt <= params.max_restarts; ++attempt) {
    const SeedQuadratic seed = out.seed;
    out.report.eps_history.push_back(seed.eps);
    std::vector<IterationRecord> recs;
    ScalarGrid w(layout);
    std::optional<detail::AttemptFailure> failure;
    IterationStatus status = IterationStatus::MaxIter;

    try {
      for (int it = 0;; ++it) {
        const LinearSystem sys = assemble_linearized(w, seed, f);
        IterationRecord rec;
        rec.m = it;
        const ScalarGrid g = detail::scatter(layout, sys.rhs);
        rec.g_inf = g.max_abs();
        rec.g_calpha = calpha_surrogate(g, seed.alpha);
        rec.w_norm = c2alpha_surrogate(w, seed.alpha).total();
        rec.min_margin = sys.min_margin;
        rec.min_margin_excess = sys.min_margin_excess;
        rec.rounding_floor = sys.rounding_floor;

        if (rec.g_inf <= std::max(params.tol_newton, 10.0 * sys.rounding_floor)) {
          out.report.at_floor = rec.g_inf > params.tol_newton;
          recs.push_back(rec);
          status = IterationStatus::Converged;
          break;
        }
        if (it >= params.max_iter) {
          recs.push_back(rec);
          status = IterationStatus::MaxIter;
          break;
        }

        const auto sol = solve_dirichlet(sys, grid.tol_lin);
        rec.lin_residual = sol.relative_residual;
        rec.lin_residual_inf = sol.residual_inf;
        rec.lin_iterations = sol.iterations;
        rec.rho_inf = sol.rho.max_abs();
        rec.rho_norm = c2alpha_surrogate(sol.rho, seed.alpha).total();
        recs.push_back(rec);

        w += sol.rho;
        const double wn = c2alpha_surrogate(w, seed.alpha).total();
        if (wn > params.w_norm_limit) {
          failure = detail::AttemptFailure{IterationStatus::EllipticityLost,
                                           "surrogate norm of w exceeds " + std::to_string(params.w_norm_limit)};
          break;
        }
      }
    } catch (const EllipticityError& e) {
      failure = detail::AttemptFailure{IterationStatus::EllipticityLost, e.what()};
    } catch (const DomainError& e) {
      failure = detail::AttemptFailure{IterationStatus::EllipticityLost, e.what()};
    }

    detail::fill_decay_ratios(recs);
    if (!failure) {
      out.w = w;
      out.report.records = std::move(recs);
      out.report.status = status;
      out.report.attempts.push_back({seed.eps, status, "", static_cast<int>(out.report.records.size())});
      out.report.eps = seed.eps;
      out.report.eps_prime = seed.eps_prime;
      return out;
    }

    out.report.records = std::move(recs);
    out.w = w;
    out.report.eps = seed.eps;
    out.report.eps_prime = seed.eps_prime;
    if (attempt == params.max_restarts) {
      out.report.attempts.push_back({seed.eps, failure->status, failure->reason, static_cast<int>(out.report.records.size())});
      out.report.status = failure->status;
      return out;
    }
    out.report.attempts.push_back({seed.eps, IterationStatus::EpsilonRetuned, failure->reason,
                                   static_cast<int>(out.report.records.size())});
    out.seed = with_epsilon(seed, seed.eps * 0.5);
  }
  return out;
}

/// u on the physical grid y = eps^2 x together with its Hessian, and w with
/// its affine part at the origin removed.
struct SolutionField {
  LayoutPtr layout;
  double coordinate_scale = 0.0;   // y = coordinate_scale * x
  ScalarGrid u;
  ScalarGrid w;                    // as solved
  ScalarGrid w_normalized;         // w - w(0) - x . grad w(0)
  double w0 = 0.0;
  std::vector<double> grad_w0;
  std::vector<SmallMatrix> hessian_u;  // per grid point: diag(tau) + eps' D^2 w
  double normalized_value_at_origin = 0.0;
  double normalized_grad_at_origin = 0.0;  // max |.|
};

inline SolutionField assemble_solution(const ScalarGrid& w, const SeedQuadratic& seed) {
  const GridLayout& g = w.layout();
  const int n = g.dim();
  const double e2 = seed.eps * seed.eps;
  const double e4 = e2 * e2;
  SolutionField out;
  out.layout = w.layout_ptr();
  out.coordinate_scale = e2;
  out.w = w;
  out.u = ScalarGrid(w.layout_ptr());

  const HessianField d = hessian_of(w);
  const std::size_t c = g.centre();
  out.w0 = w[c];
  out.grad_w0.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.grad_w0[static_cast<std::size_t>(i)] = d.grad(c, i);

  out.w_normalized = ScalarGrid(w.layout_ptr());
  out.hessian_u.reserve(g.size());
  for (std::size_t p = 0; p < g.size(); ++p) {
    double psi = 0.0;
    double affine = out.w0;
    for (int i = 0; i < n; ++i) {
      const double x = g.coord(p, i);
      psi += 0.5 * seed.tau[i] * x * x;
      affine += out.grad_w0[static_cast<std::size_t>(i)] * x;
    }
    out.u[p] = e4 * psi + seed.eps_prime * e4 * w[p];
    out.w_normalized[p] = w[p] - affine;
    SmallMatrix r(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) r(i, j) = (i == j ? seed.tau[i] : 0.0) + seed.eps_prime * d.hess(p, i, j);
    out.hessian_u.push_back(r);
  }

  const HessianField dn = hessian_of(out.w_normalized);
  out.normalized_value_at_origin = out.w_normalized[c];
  for (int i = 0; i < n; ++i) out.normalized_grad_at_origin = std::max(out.normalized_grad_at_origin, std::abs(dn.grad(c, i)));
  return out;
}

inline constexpr double kCertTol = 1e-8;

struct ConvexityCertificate {
  int k = 0;
  double tol = kCertTol;
  std::vector<double> min_s;         // index j-1: min over interior points of S_j(D^2 u)
  std::vector<double> max_s;
  std::vector<bool> is_convex;       // index j-1: min S_j >= -tol
  bool p2_pattern = false;           // S_j > 0 for j < k and S_{k+1} < 0 at every point
  bool k_nonnegative = false;        // S_k >= -tol at every point

  bool flag(int j) const { return is_convex.at(static_cast<std::size_t>(j - 1)); }
};

/// S_j(D^2 u) for j = 1..n at every interior point.
inline ConvexityCertificate certify_convexity(const SolutionField& sol, int k, double tol = kCertTol) {
  const GridLayout& g = *sol.layout;
  const int n = g.dim();
  if (k < 1 || k > n) throw DomainError("certify_convexity: need 1 <= k <= n");
  ConvexityCertificate cert;
  cert.k = k;
  cert.tol = tol;
  cert.min_s.assign(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  cert.max_s.assign(static_cast<std::size_t>(n), -std::numeric_limits<double>::infinity());
  for (std::size_t p : g.interior()) {
    for (int j = 1; j <= n; ++j) {
      const double s = sk_of_matrix(sol.hessian_u[p], j);
      cert.min_s[static_cast<std::size_t>(j - 1)] = std::min(cert.min_s[static_cast<std::size_t>(j - 1)], s);
      cert.max_s[static_cast<std::size_t>(j - 1)] = std::max(cert.max_s[static_cast<std::size_t>(j - 1)], s);
    }
  }
  for (int j = 1; j <= n; ++j) cert.is_convex.push_back(cert.min_s[static_cast<std::size_t>(j - 1)] >= -tol);
  cert.p2_pattern = k + 1 <= n && cert.max_s[static_cast<std::size_t>(k)] < 0.0;
  for (int j = 1; j < k; ++j) cert.p2_pattern = cert.p2_pattern && cert.min_s[static_cast<std::size_t>(j - 1)] > 0.0;
  cert.k_nonnegative = cert.min_s[static_cast<std::size_t>(k - 1)] >= -tol;
  return cert;
}

}  // namespace khessian
