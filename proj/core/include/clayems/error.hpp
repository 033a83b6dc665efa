#pragma once

#include <stdexcept>
#include <string>

namespace clayems {

// Base of every error thrown by the library. The CLI maps the subclasses
// onto exit codes (validation -> 2, solver failures -> 3).
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain (negative moles, P <= 0, ...).
class DomainError : public Error {
  public:
    using Error::Error;
};

// Argument inside the domain but outside the supported range (T window).
class RangeError : public Error {
  public:
    using Error::Error;
};

// Inconsistent sizes, bad wiring, unknown names.
class StructuralError : public Error {
  public:
    using Error::Error;
};

// Input files that fail schema or cross-reference validation.
class ValidationError : public Error {
  public:
    using Error::Error;
};

// Iterative solver did not reach its tolerance.
class ConvergenceError : public Error {
  public:
    ConvergenceError(const std::string& what, double last_residual)
        : Error(what), last_residual_(last_residual) {}
    double last_residual() const noexcept { return last_residual_; }

  private:
    double last_residual_;
};

// Optimization problem without a feasible point.
class InfeasibleError : public Error {
  public:
    using Error::Error;
};

// A state that violates a physical invariant (negative holdup after a step).
class StateError : public Error {
  public:
    using Error::Error;
};

}  // namespace clayems
