#pragma once

#include <stdexcept>
#include <string>

namespace steindom {

// Raised when an adaptive rule or series fails to meet its tolerance.
// Carries the best value reached and the residual error estimate.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double partial_value, double residual)
      : std::runtime_error(what), partial_(partial_value), residual_(residual) {}

  double partial_value() const noexcept { return partial_; }
  double residual() const noexcept { return residual_; }

 private:
  double partial_;
  double residual_;
};

// x = 0 passed to an estimator whose shrinkage does not vanish at the origin.
class SingularInputError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace steindom
