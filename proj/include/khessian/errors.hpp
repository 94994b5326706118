#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace khessian {

/// Precondition violated by the caller (index out of range, point outside a cone, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed or inconsistent problem configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Combinatorial work guard exceeded.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// A constructive procedure did not reach its postcondition.
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Strict diagonal dominance of the second-order coefficients lost at a grid point.
class EllipticityError : public std::runtime_error {
 public:
  EllipticityError(const std::string& what, std::size_t point, int row, double margin)
      : std::runtime_error(what), point_(point), row_(row), margin_(margin) {}

  std::size_t point() const noexcept { return point_; }
  int row() const noexcept { return row_; }
  double margin() const noexcept { return margin_; }

 private:
  std::size_t point_;
  int row_;
  double margin_;
};

/// Linear solver failed to reach the requested residual.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), history_(std::move(history)) {}

  const std::vector<double>& residual_history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

/// No admissible scaling parameter found.
class TuningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace khessian
