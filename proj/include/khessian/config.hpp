#pragma once

/// Problem configuration as a single JSON document.
///
///   {
///     "n": 3, "k": 2, "alpha": 0.5,
///     "rhs": {"preset": "fzero-linear"}            or {"terms": [...], "box": 1.0},
///     "seed": {"l": 1}                             or {"l": "full"},
///     "epsilon": null,                             fixed eps skips tuning
///     "grid": {"m": 17},
///     "solver": {"tol_lin": 1e-10, "tol_newton": 1e-9, "max_iter": 12},
///     "output": {"directory": "out", "emit_plots_csv": false},
///     "rng_seed": 0
///   }

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "khessian/errors.hpp"
#include "khessian/rhs.hpp"

namespace khessian {

struct ProblemConfig {
  int n = 3;
  int k = 2;
  double alpha = 0.5;
  std::optional<std::string> rhs_preset;  // set when the rhs was given by name
  RhsSpec rhs;
  std::optional<int> seed_level;          // empty means "full" (equal entries)
  std::optional<double> epsilon;
  int m = 17;
  double tol_lin = 1e-10;
  double tol_newton = 1e-9;
  int max_iter = 12;
  std::string output_directory = "out";
  bool emit_plots_csv = false;
  std::uint64_t rng_seed = 0;

  /// Level l passed to the positive seed.
  int level() const { return seed_level ? *seed_level : n - k + 1; }
  double c() const { return rhs.value_at_origin(); }
};

namespace detail {

template <class T>
T get_field(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: field '") + key + "': " + e.what());
  }
}

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError("config: " + msg);
}

}  // namespace detail

inline void validate(const ProblemConfig& c) {
  using detail::require;
  require(c.n >= 3 && c.n <= 4, "n must be 3 or 4");
  require(c.k >= 2 && c.k <= c.n - 1, "need 2 <= k <= n-1");
  require(c.alpha > 0.0 && c.alpha < 1.0, "alpha must lie in (0,1)");
  require(c.rhs.dim() == c.n, "rhs dimension differs from n");
  if (c.seed_level) require(*c.seed_level >= 1 && *c.seed_level <= c.n - c.k + 1, "seed.l must lie in [1, n-k+1]");
  if (c.epsilon) require(*c.epsilon > 0.0 && *c.epsilon <= 1.0, "epsilon must lie in (0,1]");
  require(c.m >= 9 && c.m % 2 == 1, "grid.m must be odd and >= 9");
  require(c.m <= (c.n == 3 ? 65 : 33), "grid.m exceeds the cap for this n");
  require(c.tol_lin > 0.0 && c.tol_newton > 0.0, "tolerances must be positive");
  require(c.max_iter >= 1, "solver.max_iter must be positive");
  require(!c.output_directory.empty(), "output.directory must be non-empty");
}

inline ProblemConfig config_from_json(const nlohmann::json& j) {
  using detail::get_field;
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  ProblemConfig c;
  c.n = get_field(j, "n", c.n);
  c.k = get_field(j, "k", c.k);
  c.alpha = get_field(j, "alpha", c.alpha);
  detail::require(c.n >= 2 && c.n <= kMaxDim, "n must lie in [2, 4]");

  if (!j.contains("rhs") || !j["rhs"].is_object()) throw ConfigError("config: missing object 'rhs'");
  const auto& r = j["rhs"];
  try {
    if (r.contains("preset")) {
      c.rhs_preset = r["preset"].get<std::string>();
      c.rhs = rhs_preset(*c.rhs_preset, c.n, c.alpha);
    } else {
      c.rhs = rhs_from_json(r, c.n, c.alpha);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: rhs: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(std::string("config: rhs: ") + e.what());
  }

  if (j.contains("seed")) {
    const auto& s = j["seed"];
    if (s.contains("l")) {
      if (s["l"].is_string()) {
        detail::require(s["l"].get<std::string>() == "full", "seed.l must be an integer or \"full\"");
      } else {
        c.seed_level = get_field<int>(s, "l", 1);
      }
    } else {
      c.seed_level = 1;
    }
  } else {
    c.seed_level = 1;
  }
  if (j.contains("epsilon") && !j["epsilon"].is_null()) c.epsilon = get_field<double>(j, "epsilon", 0.5);

  if (j.contains("grid")) c.m = get_field(j["grid"], "m", c.m);
  if (j.contains("solver")) {
    const auto& s = j["solver"];
    c.tol_lin = get_field(s, "tol_lin", c.tol_lin);
    c.tol_newton = get_field(s, "tol_newton", c.tol_newton);
    c.max_iter = get_field(s, "max_iter", c.max_iter);
  }
  if (j.contains("output")) {
    const auto& o = j["output"];
    c.output_directory = get_field(o, "directory", c.output_directory);
    c.emit_plots_csv = get_field(o, "emit_plots_csv", c.emit_plots_csv);
  }
  c.rng_seed = get_field<std::uint64_t>(j, "rng_seed", c.rng_seed);
  validate(c);
  return c;
}

inline nlohmann::json to_json(const ProblemConfig& c) {
  nlohmann::json j;
  j["n"] = c.n;
  j["k"] = c.k;
  j["alpha"] = c.alpha;
  j["rhs"] = c.rhs_preset ? nlohmann::json{{"preset", *c.rhs_preset}} : to_json_value(c.rhs);
  j["seed"] = {{"l", c.seed_level ? nlohmann::json(*c.seed_level) : nlohmann::json("full")}};
  j["epsilon"] = c.epsilon ? nlohmann::json(*c.epsilon) : nlohmann::json(nullptr);
  j["grid"] = {{"m", c.m}};
  j["solver"] = {{"tol_lin", c.tol_lin}, {"tol_newton", c.tol_newton}, {"max_iter", c.max_iter}};
  j["output"] = {{"directory", c.output_directory}, {"emit_plots_csv", c.emit_plots_csv}};
  j["rng_seed"] = c.rng_seed;
  return j;
}

inline bool operator==(const ProblemConfig& a, const ProblemConfig& b) { return to_json(a) == to_json(b); }

inline ProblemConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config: cannot open " + path);
  try {
    return config_from_json(nlohmann::json::parse(is));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: parse error: ") + e.what());
  }
}

}  // namespace khessian
