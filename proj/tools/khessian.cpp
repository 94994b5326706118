// Command-line front end: cone classify, seed, solve, verify.
// JSON goes to stdout, a one-line summary to stderr.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "khessian/khessian.hpp"

namespace {

using namespace khessian;

constexpr int kExitParse = 2;
constexpr int kExitOutside = 1;
constexpr int kExitConstruction = 3;

std::vector<double> parse_lambda(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string cell = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (cell.empty() || end == cell.c_str() || *end != '\0') throw ConfigError("malformed lambda entry '" + cell + "'");
    out.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

int cmd_cone(const std::string& lambda_text, int k, double tol) {
  try {
    const Spectrum lam(parse_lambda(lambda_text));
    if (k < 1 || k > lam.size() - 1) throw ConfigError("classify needs 1 <= k <= n-1");
    const ConeVerdict v = classify_boundary(lam, k, tol);
    std::cout << to_json(v).dump(2) << '\n';
    std::cerr << to_string(v.kind) << (v.ambiguous ? " (ambiguous)" : "") << '\n';
    return v.kind == ConeKind::Outside ? kExitOutside : 0;
  } catch (const std::exception& e) {
    std::cerr << "cone classify: " << e.what() << '\n';
    return kExitParse;
  }
}

int cmd_seed(int k, int n, double c, const std::string& level, double alpha) {
  int l = 1;
  if (level == "full") {
    l = n - k + 1;
  } else {
    try {
      std::size_t used = 0;
      l = std::stoi(level, &used);
      if (used != level.size()) throw std::invalid_argument(level);
    } catch (const std::exception&) {
      std::cerr << "seed: --l must be an integer or 'full'\n";
      return kExitParse;
    }
  }
  try {
    const SeedQuadratic seed = seed_for_value(k, n, c, l, alpha);
    std::cout << nlohmann::json{{"seed", to_json(seed)}, {"certificate", to_json(certify_seed(seed))}}.dump(2) << '\n';
    std::cerr << "seed " << seed.construction << ", convexity class " << seed.convexity_class << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "seed: " << e.what() << '\n';
    return kExitConstruction;
  }
}

int cmd_solve(const std::string& config_path, const std::string& out_override) {
  ProblemConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kSolveConfigError;
  }
  const std::string dir = out_override.empty() ? cfg.output_directory : out_override;
  try {
    const SolveOutcome res = run_solve(cfg, dir);
    nlohmann::json summary = {{"exit_code", res.exit_code}, {"output", dir}};
    if (res.report.contains("iteration")) summary["status"] = res.report["iteration"]["status"];
    if (res.report.contains("certificate")) summary["certificate"] = res.report["certificate"]["j_convex"];
    std::cout << summary.dump(2) << '\n';
    std::cerr << (res.exit_code == 0 ? "Converged" : "solve failed: " + res.message) << '\n';
    return res.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "solve: " << e.what() << '\n';
    return kSolveFailed;
  }
}

int cmd_verify(const std::string& suite, long samples, std::uint64_t seed) {
  std::vector<std::string> suites;
  if (suite == "all") {
    suites = verify_suites();
  } else {
    suites = {suite};
  }
  nlohmann::json out = nlohmann::json::array();
  bool ok = true;
  try {
    for (const auto& s : suites) {
      const VerifyResult r = run_verify_suite(s, samples, seed);
      out.push_back(to_json(r));
      std::cerr << r.suite << ": " << r.checked - r.failed << " passed, " << r.failed << " failed";
      if (r.skipped > 0) std::cerr << ", " << r.skipped << " skipped";
      std::cerr << '\n';
      ok = ok && r.ok();
    }
  } catch (const DomainError& e) {
    std::cerr << e.what() << '\n';
    return kExitParse;
  }
  std::cout << out.dump(2) << '\n';
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local solutions of k-Hessian equations"};
  app.require_subcommand(1);

  auto* cone = app.add_subcommand("cone", "Garding cone queries");
  cone->require_subcommand(1);
  auto* classify = cone->add_subcommand("classify", "Classify a spectrum against Gamma_k");
  std::string lambda_text;
  int cone_k = 0;
  double cone_tol = kConeTol;
  classify->add_option("--lambda", lambda_text, "comma-separated entries")->required();
  classify->add_option("--k", cone_k, "order k, 1 <= k <= n-1")->required();
  classify->add_option("--tol", cone_tol, "classification tolerance");

  auto* seed = app.add_subcommand("seed", "Construct a quadratic seed");
  int seed_k = 0;
  int seed_n = 0;
  double seed_c = 0.0;
  std::string seed_l = "1";
  double seed_alpha = 0.5;
  seed->add_option("--k", seed_k)->required();
  seed->add_option("--n", seed_n)->required();
  seed->add_option("--c", seed_c)->required();
  seed->add_option("--l", seed_l, "level for c > 0: integer or 'full'");
  seed->add_option("--alpha", seed_alpha);

  auto* solve = app.add_subcommand("solve", "Run the Newton scheme for a configuration");
  std::string config_path;
  std::string out_dir;
  solve->add_option("--config", config_path)->required();
  solve->add_option("--out", out_dir, "output directory (overrides the config)");

  auto* verify = app.add_subcommand("verify", "Randomized property sweeps");
  std::string suite = "all";
  long samples = 1000;
  std::uint64_t rng_seed = 7;
  verify->add_option("--suite", suite, "cone-equivalence, maclaurin, garding-inequality, identities, p2-ellipticity or all");
  verify->add_option("--samples", samples);
  verify->add_option("--seed", rng_seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }

  if (classify->parsed()) return cmd_cone(lambda_text, cone_k, cone_tol);
  if (seed->parsed()) return cmd_seed(seed_k, seed_n, seed_c, seed_l, seed_alpha);
  if (solve->parsed()) return cmd_solve(config_path, out_dir);
  if (verify->parsed()) return cmd_verify(suite, samples, rng_seed);
  return kExitParse;
}
