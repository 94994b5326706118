#pragma once

/// CSV grids with a JSON sidecar, and JSON forms of verdicts, seeds and
/// iteration reports.
///
/// CSV: header `x1,...,xn,value`, one row per grid point in lexicographic
/// order of grid indices (first axis slowest), numbers printed with %.17g.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "khessian/cone.hpp"
#include "khessian/errors.hpp"
#include "khessian/grid.hpp"
#include "khessian/iterate.hpp"
#include "khessian/seeds.hpp"

namespace khessian {

using nlohmann::json;

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Writes `g` with coordinates multiplied by `scale`.
inline void write_grid_csv(std::ostream& os, const ScalarGrid& g, double scale = 1.0) {
  const GridLayout& lay = g.layout();
  const int n = lay.dim();
  for (int i = 1; i <= n; ++i) os << 'x' << i << ',';
  os << "value\n";
  for (std::size_t p = 0; p < lay.size(); ++p) {
    for (int i = 0; i < n; ++i) os << format_double(scale * lay.coord(p, i)) << ',';
    os << format_double(g[p]) << '\n';
  }
}

struct CsvGrid {
  int n = 0;
  std::vector<std::vector<double>> coords;
  std::vector<double> values;
};

inline CsvGrid read_grid_csv(std::istream& is) {
  CsvGrid out;
  std::string line;
  if (!std::getline(is, line)) throw DomainError("grid csv: missing header");
  std::size_t cols = 1;
  for (char ch : line) cols += ch == ',';
  if (cols < 2) throw DomainError("grid csv: header needs coordinates and value");
  out.n = static_cast<int>(cols) - 1;
  for (int i = 1; i <= out.n; ++i) {
    const std::string want = "x" + std::to_string(i) + ",";
    if (line.compare(0, want.size(), want) != 0) throw DomainError("grid csv: unexpected header " + line);
    line.erase(0, want.size());
  }
  if (line != "value") throw DomainError("grid csv: last column must be 'value'");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != cols) throw DomainError("grid csv: ragged row");
    out.values.push_back(row.back());
    row.pop_back();
    out.coords.push_back(std::move(row));
  }
  return out;
}

inline json to_json(const Spectrum& s) { return s.vector(); }

inline json to_json(const ConeVerdict& v) {
  return {{"kind", to_string(v.kind)},
          {"k", v.k},
          {"tol", v.tol},
          {"sigma", v.sigmas.sigma},
          {"margin", v.margin},
          {"ambiguous", v.ambiguous},
          {"km1_row", v.km1_row},
          {"km1_row_min", v.km1_row_min}};
}

inline json to_json(const SeedQuadratic& s) {
  json j = {{"tau", to_json(s.tau)},
            {"k", s.k},
            {"n", s.n},
            {"c", s.c},
            {"alpha", s.alpha},
            {"eps", s.eps},
            {"eps_prime", s.eps_prime},
            {"convexity_class", s.convexity_class},
            {"construction", s.construction}};
  if (!s.lift_delta.empty()) j["lift"] = {{"delta", s.lift_delta}, {"t", s.lift_t}, {"scale", s.lift_scale}};
  return j;
}

inline json to_json(const SeedCertificate& c) {
  json j = {{"ellipticity_margin", c.ellipticity_margin}, {"convexity_class", c.convexity_class}};
  j["not_class"] = c.not_class ? json(*c.not_class) : json(nullptr);
  return j;
}

inline json to_json(const IterationRecord& r) {
  json j = {{"m", r.m},
            {"g_inf", r.g_inf},
            {"g_calpha", r.g_calpha},
            {"w_norm", r.w_norm},
            {"rho_inf", r.rho_inf},
            {"rho_norm", r.rho_norm},
            {"min_margin", r.min_margin},
            {"min_margin_excess", r.min_margin_excess},
            {"lin_residual", r.lin_residual},
            {"lin_residual_inf", r.lin_residual_inf},
            {"lin_iterations", r.lin_iterations},
            {"rounding_floor", r.rounding_floor}};
  j["q"] = r.q ? json(*r.q) : json(nullptr);
  j["q_above_floor"] = r.q_above_floor;
  return j;
}

inline json to_json(const IterationReport& rep) {
  json recs = json::array();
  for (const auto& r : rep.records) recs.push_back(to_json(r));
  json attempts = json::array();
  for (const auto& a : rep.attempts)
    attempts.push_back({{"eps", a.eps}, {"status", to_string(a.status)}, {"reason", a.reason}, {"iterations", a.iterations}});
  return {{"status", to_string(rep.status)},
          {"at_floor", rep.at_floor},
          {"eps", rep.eps},
          {"eps_prime", rep.eps_prime},
          {"margin_threshold", rep.threshold},
          {"eps_history", rep.eps_history},
          {"attempts", attempts},
          {"records", recs}};
}

inline json to_json(const TuneResult& t) {
  json steps = json::array();
  for (const auto& s : t.steps)
    steps.push_back({{"eps", s.eps},
                     {"g0_norm", s.g0_norm},
                     {"rho0_norm", s.rho0_norm},
                     {"c_hat", s.c_hat},
                     {"min_margin_excess", s.min_margin_excess},
                     {"passed", s.passed},
                     {"note", s.note}});
  return {{"eps", t.eps}, {"eps_prime", t.eps_prime}, {"steps", steps}};
}

inline json to_json(const ConvexityCertificate& c) {
  json flags = json::object();
  for (std::size_t j = 0; j < c.is_convex.size(); ++j) flags[std::to_string(j + 1)] = static_cast<bool>(c.is_convex[j]);
  return {{"k", c.k},
          {"tol", c.tol},
          {"j_convex", flags},
          {"min_S", c.min_s},
          {"max_S", c.max_s},
          {"p2_pattern", c.p2_pattern},
          {"k_nonnegative", c.k_nonnegative}};
}

/// Sidecar for a CSV grid: {n, m, h, coordinate_scale, seed}.
inline json grid_sidecar(const GridLayout& lay, const SeedQuadratic& seed, double scale) {
  return {{"n", lay.dim()},
          {"m", lay.points_per_axis()},
          {"h", scale * lay.spacing()},
          {"coordinate_scale", scale},
          {"seed", to_json(seed)}};
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << text;
  if (!os) throw std::runtime_error("write failed for " + path);
}

inline void write_grid_files(const std::string& stem, const ScalarGrid& g, const SeedQuadratic& seed, double scale) {
  std::ostringstream os;
  write_grid_csv(os, g, scale);
  write_text(stem + ".csv", os.str());
  write_text(stem + ".json", grid_sidecar(g.layout(), seed, scale).dump(2) + "\n");
}

}  // namespace khessian
