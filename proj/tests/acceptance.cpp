// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "khessian/khessian.hpp"
#include "manufactured.hpp"

using namespace khessian;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

// Runs shared between criteria.
struct ManufacturedRun {
  int m = 0;
  NewtonResult res;
  double error = 0.0;
  double wstar_norm = 0.0;
};
std::vector<ManufacturedRun> g_manufactured;
std::vector<IterationReport> g_converged;

Outcome p2_exactness() {
  double worst = 0.0;
  bool ok = true;
  for (int n = 3; n <= 6; ++n)
    for (int k = 2; k < n; ++k) {
      const Spectrum lam = p2_example(k, n);
      const auto s = elem_sym_all(lam, k + 1);
      for (int j = 1; j < k; ++j) ok = ok && s[j] > 0.0;
      worst = std::max({worst, std::abs(s[k]), std::abs(s[k + 1] + 1.0)});
    }
  ok = ok && worst <= 1e-10;
  return {ok, "max identity error " + fmt("%.2e", worst)};
}

Outcome from_suite(const VerifyResult& r, const std::string& extra) {
  std::string d = std::to_string(r.checked) + " checked, " + std::to_string(r.failed) + " failed";
  if (r.skipped > 0) d += ", " + std::to_string(r.skipped) + " skipped near hypersurfaces";
  if (!extra.empty()) d += ", " + extra;
  return {r.ok() && r.checked > 0, d};
}

Outcome sk_gradient_fd() {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const double step = 1e-5;
  double worst = 0.0;
  for (int n = 1; n <= 4; ++n)
    for (int k = 1; k <= n; ++k)
      for (int s = 0; s < 100; ++s) {
        SmallMatrix r(n);
        for (int i = 0; i < n; ++i)
          for (int j = i; j < n; ++j) r(i, j) = r(j, i) = u(rng);
        const SmallMatrix g = sk_gradient(r, k);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            const double keep = r(i, j);
            r(i, j) = keep + step;
            const double up = sk_of_matrix(r, k);
            r(i, j) = keep - step;
            const double down = sk_of_matrix(r, k);
            r(i, j) = keep;
            const double fd = (up - down) / (2 * step);
            worst = std::max(worst, std::abs(fd - g(i, j)) / std::max(1.0, std::abs(g(i, j))));
          }
      }
  return {worst <= 1e-6, "max relative error " + fmt("%.2e", worst)};
}

Outcome linearization_order() {
  const auto seed = with_epsilon(seed_for_zero(2, 3), 0.5);
  auto lay = make_layout(3, 17);
  const manufactured::CosineBump bump{0.05, 3};
  const ScalarGrid w = bump.sample(lay);
  const auto f = rhs_preset("fzero-mixed", 3);
  const auto sys = assemble_linearized(w, seed, f);
  ScalarGrid dir = ScalarGrid::sample(lay, [](std::span<const double> x) { return x[0] * x[1] + 0.5 * x[2] * x[2] - 0.3 * x[0]; });
  dir.apply_dirichlet();
  const ScalarGrid Ld = apply_operator(sys, dir);
  const ScalarGrid G0 = eval_G(w, seed, f);

  std::vector<double> lx;
  std::vector<double> ly;
  for (double delta = 1e-2; delta > 1e-4; delta *= 0.5) {
    ScalarGrid wd = w;
    for (std::size_t p = 0; p < wd.size(); ++p) wd[p] += delta * dir[p];
    const ScalarGrid Gd = eval_G(wd, seed, f);
    double err = 0.0;
    for (std::size_t p : lay->interior()) err = std::max(err, std::abs((Gd[p] - G0[p]) / delta - Ld[p]));
    lx.push_back(std::log(delta));
    ly.push_back(std::log(err));
  }
  const double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {slope >= 0.9, "observed order " + fmt("%.3f", slope) + " over " + std::to_string(lx.size()) + " step sizes"};
}

Outcome manufactured_convergence() {
  const auto seed = with_epsilon(seed_for_zero(2, 3), 0.5);
  const manufactured::CosineBump bump{0.05, 3};
  const auto f = manufactured::rhs_for(bump, seed, rhs_preset("fzero-linear", 3));
  bool ok = true;
  std::string d;
  for (int m : {17, 33}) {
    ManufacturedRun run;
    run.m = m;
    auto lay = make_layout(3, m);
    const ScalarGrid exact = bump.sample(lay);
    run.wstar_norm = c2alpha_surrogate(exact, seed.alpha).total();
    run.res = newton_loop(seed, f, GridParams{m}, NewtonParams{});
    for (std::size_t p = 0; p < lay->size(); ++p) run.error = std::max(run.error, std::abs(run.res.w[p] - exact[p]));
    const int iterations = static_cast<int>(run.res.report.records.size()) - 1;
    const bool conv = run.res.report.status == IterationStatus::Converged;
    ok = ok && conv && iterations <= 6 && run.wstar_norm <= 0.5;
    if (conv) g_converged.push_back(run.res.report);
    d += "m=" + std::to_string(m) + ": " + to_string(run.res.report.status) + " in " + std::to_string(iterations) +
         " iterations, |w-w*|=" + fmt("%.3e", run.error) + ", |w*|=" + fmt("%.3f", run.wstar_norm) + "; ";
    g_manufactured.push_back(run);
  }
  const double ratio = g_manufactured[0].error / g_manufactured[1].error;
  ok = ok && ratio >= 3.0;
  return {ok, d + "ratio " + fmt("%.2f", ratio)};
}

Outcome quadratic_decay() {
  bool ok = !g_manufactured.empty();
  std::string d;
  for (const auto& run : g_manufactured) {
    std::vector<double> q;
    for (const auto& r : run.res.report.records)
      if (r.q && r.q_above_floor) q.push_back(*r.q);
    if (q.empty()) {
      d += "m=" + std::to_string(run.m) + ": no ratio above the floor; ";
      ok = false;
      continue;
    }
    std::vector<double> sorted = q;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t h = sorted.size() / 2;
    const double median = sorted.size() % 2 ? sorted[h] : 0.5 * (sorted[h - 1] + sorted[h]);
    for (double v : q) ok = ok && v <= 10 * median && v >= median / 10;
    d += "m=" + std::to_string(run.m) + ": q =";
    for (double v : q) d += " " + fmt("%.3g", v);
    d += "; ";
  }
  return {ok, d};
}

Outcome certificates() {
  const fs::path root = fs::temp_directory_path() / "khessian_acceptance";
  fs::remove_all(root);
  bool ok = true;
  std::string d;
  struct Case {
    const char* preset;
    int l;  // 0 means the equal-entry seed
  };
  for (const Case c : {Case{"fzero-linear", 1}, Case{"fconst-neg", 1}, Case{"fconst-pos", 0}}) {
    ProblemConfig cfg;
    cfg.rhs_preset = c.preset;
    cfg.rhs = rhs_preset(c.preset, 3);
    if (c.l > 0) {
      cfg.seed_level = c.l;
    } else {
      cfg.seed_level.reset();
    }
    cfg.m = 17;
    const auto t0 = std::chrono::steady_clock::now();
    const SolveOutcome out = run_solve(cfg, (root / c.preset).string());
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool this_ok = out.exit_code == 0 && secs < 120.0;
    if (this_ok) {
      const auto& flags = out.report["certificate"]["j_convex"];
      const std::string p = c.preset;
      if (p == "fzero-linear") this_ok = flags["1"] == true && flags["3"] == false;
      if (p == "fconst-neg") this_ok = flags["2"] == false;
      if (p == "fconst-pos") this_ok = flags["1"] == true && flags["2"] == true && flags["3"] == true;
      IterationReport rep;
      rep.threshold = out.report["iteration"]["margin_threshold"];
      for (const auto& r : out.report["iteration"]["records"]) {
        IterationRecord rec;
        rec.min_margin = r["min_margin"];
        rep.records.push_back(rec);
      }
      g_converged.push_back(rep);
      d += p + " " + out.report["certificate"]["j_convex"].dump() + " " + fmt("%.1fs", secs) + "; ";
    } else {
      d += std::string(c.preset) + " exit " + std::to_string(out.exit_code) + " " + out.message + "; ";
    }
    ok = ok && this_ok;
  }
  fs::remove_all(root);
  return {ok, d};
}

Outcome ellipticity_monitor() {
  bool ok = !g_converged.empty();
  double worst = std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;
  for (const auto& rep : g_converged)
    for (const auto& r : rep.records) {
      ++iterations;
      worst = std::min(worst, r.min_margin - rep.threshold);
      ok = ok && r.min_margin >= rep.threshold;
    }
  return {ok, std::to_string(g_converged.size()) + " runs, " + std::to_string(iterations) +
                  " iterations, smallest margin above threshold " + fmt("%.4f", worst)};
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "khessian_determinism";
  fs::remove_all(root);
  ProblemConfig cfg;
  cfg.rhs_preset = "fzero-linear";
  cfg.rhs = rhs_preset("fzero-linear", 3);
  cfg.m = 17;
  const SolveOutcome a = run_solve(cfg, (root / "a").string());
  const SolveOutcome b = run_solve(cfg, (root / "b").string());
  bool same = a.exit_code == 0 && b.exit_code == 0;
  for (const char* f : {"u.csv", "w.csv", "report.json"})
    same = same && slurp(root / "a" / f) == slurp(root / "b" / f) && !slurp(root / "a" / f).empty();
  fs::remove_all(root);
  return {same, same ? "u.csv, w.csv and report.json identical" : "outputs differ"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"P2 example exactness", 1.0, p2_exactness},
      {"cone-definition equivalence", 30.0, [] { return from_suite(verify_cone_equivalence(10000, 7), ""); }},
      {"P2 points have a positive (k-1)-row", 10.0,
       [] {
         const auto r = verify_p2_ellipticity(1000, 11);
         return from_suite(r, "min row " + fmt("%.3e", r.worst));
       }},
      {"Garding inequality", 30.0,
       [] {
         const auto r = verify_garding_inequality(10000, 13);
         return from_suite(r, "min slack " + fmt("%.3e", r.worst));
       }},
      {"algebraic identities", 0.0,
       [] {
         const auto r = verify_identities(1000, 17);
         return from_suite(r, "max relative error " + fmt("%.2e", r.worst));
       }},
      {"sk_gradient vs finite differences", 0.0, sk_gradient_fd},
      {"linearization consistency", 0.0, linearization_order},
      {"manufactured-solution convergence", 300.0, manufactured_convergence},
      {"quadratic residual decay", 0.0, quadratic_decay},
      {"convexity certificates", 0.0, certificates},
      {"ellipticity monitor", 0.0, ellipticity_monitor},
      {"determinism", 0.0, determinism},
  };

  int failed = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0.0 && secs > c.budget_s) {
      o.pass = false;
      o.detail += " (over the " + fmt("%.0f", c.budget_s) + " s budget)";
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s %2d %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", index, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
