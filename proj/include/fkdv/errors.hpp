#pragma once

#include <stdexcept>
#include <string>

namespace fkdv {

// Iterative solver failure with the diagnostics the caller needs to decide
// between retrying, refining the step, or reporting.
class SolveError : public std::runtime_error {
  public:
    enum class Kind {
        divergence,         // iteration count exhausted without convergence
        constant_collapse,  // iterate drifted to the constant solution
        near_fold,          // Jacobian conditioning beyond threshold
        stagnation,         // descent stopped making progress
        step_underflow,     // continuation step fell below step_min
        unresolved,         // spectral tail cannot be controlled within n_max
    };

    SolveError(Kind kind, const std::string& msg, double residual = 0.0,
               double stabilizing_factor = 0.0, int iterations = 0)
        : std::runtime_error(msg),
          kind_(kind),
          residual_(residual),
          stabilizing_factor_(stabilizing_factor),
          iterations_(iterations) {}

    Kind kind() const { return kind_; }
    double residual() const { return residual_; }
    double stabilizing_factor() const { return stabilizing_factor_; }
    int iterations() const { return iterations_; }

  private:
    Kind kind_;
    double residual_;
    double stabilizing_factor_;
    int iterations_;
};

// Conversion hit a constant or identically-zero profile; the constant branch
// is tracked separately from the single-lobe waves.
class DegenerateWave : public std::runtime_error {
  public:
    explicit DegenerateWave(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace fkdv
