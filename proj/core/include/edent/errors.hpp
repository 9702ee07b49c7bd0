#pragma once

#include <stdexcept>
#include <string>

namespace edent {

/// Bad input: violated preconditions, malformed files, inconsistent configs.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative solver ran out of iterations; `best_residual` is the smallest
/// residual norm reached by any wanted pair.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double best_residual)
      : std::runtime_error(what), best_residual_(best_residual) {}
  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

}  // namespace edent
