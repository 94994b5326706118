#pragma once

/// End-to-end run for one configuration: seed, eps, Newton iteration,
/// solution in physical variables, certificate, files.

#include <filesystem>
#include <sstream>
#include <string>

#include <json.hpp>

#include "khessian/config.hpp"
#include "khessian/io.hpp"
#include "khessian/iterate.hpp"
#include "khessian/seeds.hpp"

namespace khessian {

enum SolveExit : int { kSolveOk = 0, kSolveConfigError = 2, kSolveFailed = 4 };

struct SolveOutcome {
  int exit_code = kSolveFailed;
  nlohmann::json report;
  std::string message;
};

namespace detail {

// max over interior points of |S_k(D^2 u) - f(y, u, Du)| in physical variables.
template <RhsFunction F>
double physical_residual(const SolutionField& sol, const ScalarGrid& w, const SeedQuadratic& seed, const F& f) {
  const GridLayout& g = *sol.layout;
  const int n = g.dim();
  const HessianField d = hessian_of(w);
  const double e2 = seed.eps * seed.eps;
  double worst = 0.0;
  std::array<double, kMaxDim> y{};
  std::array<double, kMaxDim> p{};
  for (std::size_t pt : g.interior()) {
    for (int i = 0; i < n; ++i) {
      const double x = g.coord(pt, i);
      y[static_cast<std::size_t>(i)] = e2 * x;
      p[static_cast<std::size_t>(i)] = e2 * seed.tau[i] * x + seed.eps_prime * e2 * d.grad(pt, i);
    }
    const double lhs = sk_of_matrix(sol.hessian_u[pt], seed.k);
    const double rhs = f.value(std::span<const double>(y.data(), static_cast<std::size_t>(n)), sol.u[pt],
                               std::span<const double>(p.data(), static_cast<std::size_t>(n)));
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

inline std::string residual_table(const IterationReport& rep) {
  std::ostringstream os;
  os << "m,g_inf,g_calpha,rho_inf,rho_norm,w_norm,min_margin,lin_residual,q\n";
  for (const auto& r : rep.records) {
    os << r.m << ',' << format_double(r.g_inf) << ',' << format_double(r.g_calpha) << ',' << format_double(r.rho_inf) << ','
       << format_double(r.rho_norm) << ',' << format_double(r.w_norm) << ',' << format_double(r.min_margin) << ','
       << format_double(r.lin_residual) << ',' << (r.q ? format_double(*r.q) : std::string()) << '\n';
  }
  return os.str();
}

}  // namespace detail

/// Runs the configuration and writes u.csv, w.csv (with sidecars) and
/// report.json into `out_dir`. The report is written on solver failure too.
inline SolveOutcome run_solve(const ProblemConfig& cfg, const std::string& out_dir) {
  namespace fs = std::filesystem;
  SolveOutcome out;
  nlohmann::json& rep = out.report;
  rep["config"] = to_json(cfg);

  fs::create_directories(out_dir);
  const std::string report_path = (fs::path(out_dir) / "report.json").string();
  auto finish = [&](int code, const std::string& msg) {
    out.exit_code = code;
    out.message = msg;
    rep["exit_code"] = code;
    if (!msg.empty()) rep["message"] = msg;
    write_text(report_path, rep.dump(2) + "\n");
    return out;
  };

  SeedQuadratic seed;
  try {
    seed = seed_for_value(cfg.k, cfg.n, cfg.c(), cfg.level(), cfg.alpha);
  } catch (const std::exception& e) {
    return finish(kSolveFailed, std::string("seed construction failed: ") + e.what());
  }
  rep["seed"] = to_json(seed);
  rep["seed_certificate"] = to_json(certify_seed(seed));

  const GridParams grid{cfg.m, cfg.tol_lin};
  try {
    if (cfg.epsilon) {
      seed = with_epsilon(seed, *cfg.epsilon);
      rep["tuning"] = nullptr;
    } else {
      const TuneResult tune = tune_epsilon(seed, cfg.rhs, grid);
      rep["tuning"] = to_json(tune);
      seed = with_epsilon(seed, tune.eps);
    }
  } catch (const TuningError& e) {
    return finish(kSolveFailed, e.what());
  } catch (const SolverError& e) {
    return finish(kSolveFailed, e.what());
  }

  NewtonParams np;
  np.tol_newton = cfg.tol_newton;
  np.max_iter = cfg.max_iter;
  NewtonResult res;
  try {
    res = newton_loop(seed, cfg.rhs, grid, np);
  } catch (const SolverError& e) {
    return finish(kSolveFailed, e.what());
  }
  rep["iteration"] = to_json(res.report);
  if (res.report.status != IterationStatus::Converged)
    return finish(kSolveFailed, "newton iteration ended with status " + to_string(res.report.status));

  const SolutionField sol = assemble_solution(res.w, res.seed);
  const ConvexityCertificate cert = certify_convexity(sol, cfg.k);
  rep["certificate"] = to_json(cert);
  rep["solution"] = {{"coordinate_scale", sol.coordinate_scale},
                     {"w_affine", {{"value", sol.w0}, {"gradient", sol.grad_w0}}},
                     {"normalized_value_at_origin", sol.normalized_value_at_origin},
                     {"normalized_grad_at_origin", sol.normalized_grad_at_origin},
                     {"physical_residual_max", detail::physical_residual(sol, res.w, res.seed, cfg.rhs)}};

  write_grid_files((fs::path(out_dir) / "u").string(), sol.u, res.seed, sol.coordinate_scale);
  write_grid_files((fs::path(out_dir) / "w").string(), sol.w_normalized, res.seed, 1.0);
  if (cfg.emit_plots_csv) write_text((fs::path(out_dir) / "residuals.csv").string(), detail::residual_table(res.report));
  return finish(kSolveOk, "");
}

}  // namespace khessian
