#pragma once

/// Right-hand sides f(y, u, p) of S_k[u] = f. The polynomial form carries
/// exact partial derivatives in (u, p) up to second order.

#include <array>
#include <cmath>
#include <concepts>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "khessian/errors.hpp"
#include "khessian/minors.hpp"

namespace khessian {

/// Value of f and its partials in z = (u, p_1..p_n); slot 0 is u.
struct RhsJet {
  double value = 0.0;
  std::array<double, kMaxDim + 1> dz{};
  std::array<std::array<double, kMaxDim + 1>, kMaxDim + 1> dzz{};

  double du() const noexcept { return dz[0]; }
  double dp(int i) const noexcept { return dz[static_cast<std::size_t>(i) + 1]; }
};

template <class F>
concept RhsFunction = requires(const F& f, std::span<const double> y, double u, std::span<const double> p) {
  { f.dim() } -> std::convertible_to<int>;
  { f.jet(y, u, p) } -> std::same_as<RhsJet>;
  { f.value(y, u, p) } -> std::convertible_to<double>;
};

/// coef * prod y_i^{y_exp_i} * u^{u_exp} * prod p_i^{p_exp_i}
struct Monomial {
  double coef = 0.0;
  std::vector<int> y_exp;
  int u_exp = 0;
  std::vector<int> p_exp;

  friend bool operator==(const Monomial&, const Monomial&) = default;
};

namespace detail {

inline double ipow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

// d^order/dx^order of x^e.
inline double dpow(double x, int e, int order) {
  if (order > e) return 0.0;
  double c = 1.0;
  for (int i = 0; i < order; ++i) c *= (e - i);
  return c * ipow(x, e - order);
}

}  // namespace detail

/// Polynomial f of degree <= 4 in y and <= 2 jointly in (u, p), defined on
/// the box |u| <= box, |p| <= box.
class RhsSpec {
 public:
  RhsSpec() = default;
  RhsSpec(int n, std::vector<Monomial> terms, double alpha = 0.5, double box = 1.0)
      : n_(n), terms_(std::move(terms)), alpha_(alpha), box_(box) {
    validate();
  }

  static RhsSpec constant(int n, double c, double alpha = 0.5) {
    return RhsSpec(n, {Monomial{c, std::vector<int>(static_cast<std::size_t>(n), 0), 0, std::vector<int>(static_cast<std::size_t>(n), 0)}}, alpha);
  }

  int dim() const noexcept { return n_; }
  double alpha() const noexcept { return alpha_; }
  double box() const noexcept { return box_; }
  const std::vector<Monomial>& terms() const noexcept { return terms_; }

  RhsJet jet(std::span<const double> y, double u, std::span<const double> p) const {
    check_box(u, p);
    const int nz = n_ + 1;
    std::array<double, kMaxDim + 1> z{};
    z[0] = u;
    for (int i = 0; i < n_; ++i) z[static_cast<std::size_t>(i) + 1] = p[static_cast<std::size_t>(i)];

    RhsJet out;
    std::array<int, kMaxDim + 1> e{};
    for (const auto& t : terms_) {
      double yfac = t.coef;
      for (int i = 0; i < n_; ++i) yfac *= detail::ipow(y[static_cast<std::size_t>(i)], t.y_exp[static_cast<std::size_t>(i)]);
      if (yfac == 0.0) continue;
      e[0] = t.u_exp;
      for (int i = 0; i < n_; ++i) e[static_cast<std::size_t>(i) + 1] = t.p_exp[static_cast<std::size_t>(i)];

      // product of z_a^{e_a} with per-slot derivative orders
      auto product = [&](int a, int oa, int b, int ob) {
        double v = yfac;
        for (int s = 0; s < nz; ++s) {
          int order = 0;
          if (s == a) order += oa;
          if (s == b) order += ob;
          v *= detail::dpow(z[static_cast<std::size_t>(s)], e[static_cast<std::size_t>(s)], order);
          if (v == 0.0) return 0.0;
        }
        return v;
      };

      out.value += product(-1, 0, -1, 0);
      for (int a = 0; a < nz; ++a) {
        out.dz[static_cast<std::size_t>(a)] += product(a, 1, -1, 0);
        for (int b = 0; b < nz; ++b) out.dzz[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] += product(a, 1, b, 1);
      }
    }
    return out;
  }

  double value(std::span<const double> y, double u, std::span<const double> p) const { return jet(y, u, p).value; }

  /// f(0, 0, 0).
  double value_at_origin() const {
    std::vector<double> zero(static_cast<std::size_t>(n_), 0.0);
    return value(zero, 0.0, zero);
  }

  friend bool operator==(const RhsSpec&, const RhsSpec&) = default;

 private:
  void validate() const {
    if (n_ < 2 || n_ > kMaxDim) throw DomainError("RhsSpec: dimension must lie in [2, 4]");
    if (!(alpha_ > 0.0 && alpha_ < 1.0)) throw DomainError("RhsSpec: alpha must lie in (0,1)");
    if (!(box_ > 0.0)) throw DomainError("RhsSpec: box must be positive");
    for (const auto& t : terms_) {
      if (t.y_exp.size() != static_cast<std::size_t>(n_) || t.p_exp.size() != static_cast<std::size_t>(n_))
        throw DomainError("RhsSpec: exponent vector length must equal n");
      if (!std::isfinite(t.coef)) throw DomainError("RhsSpec: coefficients must be finite");
      int ydeg = 0;
      int zdeg = t.u_exp;
      if (t.u_exp < 0) throw DomainError("RhsSpec: negative exponent");
      for (int v : t.y_exp) {
        if (v < 0) throw DomainError("RhsSpec: negative exponent");
        ydeg += v;
      }
      for (int v : t.p_exp) {
        if (v < 0) throw DomainError("RhsSpec: negative exponent");
        zdeg += v;
      }
      if (ydeg > 4) throw DomainError("RhsSpec: degree in y exceeds 4");
      if (zdeg > 2) throw DomainError("RhsSpec: degree in (u,p) exceeds 2");
    }
  }

  void check_box(double u, std::span<const double> p) const {
    double p2 = 0.0;
    for (int i = 0; i < n_; ++i) p2 += p[static_cast<std::size_t>(i)] * p[static_cast<std::size_t>(i)];
    if (std::abs(u) > box_ || std::sqrt(p2) > box_) throw DomainError("RhsSpec: argument (u,p) outside the declared box");
  }

  int n_ = 0;
  std::vector<Monomial> terms_;
  double alpha_ = 0.5;
  double box_ = 1.0;
};

/// f = base + source(y): adds a (u,p)-independent forcing term to a base
/// right-hand side, as used for manufactured solutions.
template <RhsFunction Base>
class SourcedRhs {
 public:
  SourcedRhs(Base base, std::function<double(std::span<const double>)> source)
      : base_(std::move(base)), source_(std::move(source)) {}

  int dim() const { return base_.dim(); }
  RhsJet jet(std::span<const double> y, double u, std::span<const double> p) const {
    RhsJet j = base_.jet(y, u, p);
    j.value += source_(y);
    return j;
  }
  double value(std::span<const double> y, double u, std::span<const double> p) const { return jet(y, u, p).value; }
  const Base& base() const noexcept { return base_; }

 private:
  Base base_;
  std::function<double(std::span<const double>)> source_;
};

// JSON: {"alpha":..,"box":..,"terms":[{"coef":..,"y":[..],"u":..,"p":[..]}]}
inline nlohmann::json to_json_value(const RhsSpec& f) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : f.terms()) terms.push_back({{"coef", t.coef}, {"y", t.y_exp}, {"u", t.u_exp}, {"p", t.p_exp}});
  return {{"alpha", f.alpha()}, {"box", f.box()}, {"terms", terms}};
}

inline RhsSpec rhs_from_json(const nlohmann::json& j, int n, double alpha) {
  std::vector<Monomial> terms;
  for (const auto& jt : j.at("terms")) {
    Monomial t;
    t.coef = jt.at("coef").get<double>();
    t.y_exp = jt.value("y", std::vector<int>(static_cast<std::size_t>(n), 0));
    t.u_exp = jt.value("u", 0);
    t.p_exp = jt.value("p", std::vector<int>(static_cast<std::size_t>(n), 0));
    terms.push_back(std::move(t));
  }
  return RhsSpec(n, std::move(terms), j.value("alpha", alpha), j.value("box", 1.0));
}

inline Monomial monomial(int n, double coef, std::vector<std::pair<int, int>> y = {}, int u = 0,
                         std::vector<std::pair<int, int>> p = {}) {
  Monomial t{coef, std::vector<int>(static_cast<std::size_t>(n), 0), u, std::vector<int>(static_cast<std::size_t>(n), 0)};
  for (auto [i, e] : y) t.y_exp.at(static_cast<std::size_t>(i)) = e;
  for (auto [i, e] : p) t.p_exp.at(static_cast<std::size_t>(i)) = e;
  return t;
}

/// Named right-hand sides.
///   fzero-linear  f = y1 + y2
///   fzero-mixed   f = y1 + y2 + u/2 + p1/4 + p2^2/8
///   fconst-neg    f = -1
///   fconst-match  f = 1
///   fconst-pos    f = 3
inline RhsSpec rhs_preset(const std::string& name, int n, double alpha = 0.5) {
  if (name == "fzero-linear") return RhsSpec(n, {monomial(n, 1.0, {{0, 1}}), monomial(n, 1.0, {{1, 1}})}, alpha);
  if (name == "fzero-mixed")
    return RhsSpec(n,
                   {monomial(n, 1.0, {{0, 1}}), monomial(n, 1.0, {{1, 1}}), monomial(n, 0.5, {}, 1),
                    monomial(n, 0.25, {}, 0, {{0, 1}}), monomial(n, 0.125, {}, 0, {{1, 2}})},
                   alpha);
  if (name == "fconst-neg") return RhsSpec::constant(n, -1.0, alpha);
  if (name == "fconst-match") return RhsSpec::constant(n, 1.0, alpha);
  if (name == "fconst-pos") return RhsSpec::constant(n, 3.0, alpha);
  throw DomainError("unknown right-hand side preset: " + name);
}

}  // namespace khessian
