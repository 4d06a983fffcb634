#pragma once

#include <stdexcept>
#include <string>

namespace iadmm {

/// Malformed input: dimension mismatch, non-finite entries, bad kind parameters.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Inertia/relaxation parameters outside the admissible region.
class InfeasibleParameters : public InputError {
 public:
  using InputError::InputError;
};

/// The coupling operator fails the injectivity requirement ||Lx|| >= theta ||x||.
class HypothesisError : public InputError {
 public:
  using InputError::InputError;
};

/// An inner solve (x-subproblem or composed resolvent) did not reach its tolerance.
class SubproblemFailure : public std::runtime_error {
 public:
  SubproblemFailure(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

}  // namespace iadmm
