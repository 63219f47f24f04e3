#pragma once

#include <stdexcept>
#include <string>

namespace hyperbench {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonPositiveJacobian : Error {
  explicit NonPositiveJacobian(double det)
      : Error("non-positive jacobian: det F = " + std::to_string(det)) {}
};

struct NotPositiveDefinite : Error {
  explicit NotPositiveDefinite(double min_eig)
      : Error("matrix not positive definite: min eigenvalue = " + std::to_string(min_eig)) {}
};

struct SingularMatrix : Error {
  explicit SingularMatrix(double det)
      : Error("matrix numerically singular: det = " + std::to_string(det)) {}
};

struct NotSymmetric : Error {
  explicit NotSymmetric(double rel_skew)
      : Error("matrix not symmetric: |A - A^T| / |A| = " + std::to_string(rel_skew)) {}
};

struct SingularMidpoint : Error {
  SingularMidpoint()
      : Error("midpoint configuration singular: increment too large (near-reflection)") {}
};

struct TooLargeIncrement : Error {
  explicit TooLargeIncrement(double norm_deps)
      : Error("strain increment too large: |dEps| = " + std::to_string(norm_deps) + " > 0.2") {}
};

struct CallbackFailure : Error {
  CallbackFailure() : Error("energy-derivative callback returned non-finite values") {}
};

struct InvalidParameter : Error {
  using Error::Error;
};

struct InvalidDimension : Error {
  using Error::Error;
};

struct ElementInverted : Error {
  ElementInverted(int element, double det)
      : Error("element " + std::to_string(element) +
              " inverted: det F = " + std::to_string(det)) {}
};

struct NewtonDiverged : Error {
  NewtonDiverged(int step, int iters, double residual)
      : Error("newton diverged at step " + std::to_string(step) + " after " +
              std::to_string(iters) + " iterations, residual " + std::to_string(residual)) {}
};

struct LinearSolveFailure : Error {
  explicit LinearSolveFailure(const std::string& what) : Error("linear solve failed: " + what) {}
};

struct UnknownScenario : Error {
  explicit UnknownScenario(const std::string& name) : Error("unknown scenario: " + name) {}
};

struct ConfigError : Error {
  using Error::Error;
};

struct SolverFailure : Error {
  SolverFailure(const std::string& pathway, int step, const std::string& what)
      : Error("pathway " + pathway + ", step " + std::to_string(step) + ": " + what),
        pathway_name(pathway), step_index(step) {}
  std::string pathway_name;
  int step_index;
};

}  // namespace hyperbench
