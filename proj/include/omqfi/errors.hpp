// errors.hpp — Exception types for numerical failure modes.

#pragma once

#include <stdexcept>
#include <string>

namespace omqfi {

// Adaptive stepper could not make progress (step underflow) or exceeded limits.
class IntegratorError : public std::runtime_error {
  public:
    IntegratorError(const std::string& what, double tau)
        : std::runtime_error(what + " at tau = " + std::to_string(tau)), tau_(tau) {}
    double tau() const { return tau_; }

  private:
    double tau_;
};

// Truncated-Fock-space oracle lost probability mass beyond its tolerance.
class TruncationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Oracle step halving did not reach the requested convergence target.
class ConvergenceError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace omqfi
