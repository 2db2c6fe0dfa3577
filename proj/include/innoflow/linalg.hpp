#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace innoflow {

struct SpectralRadius {
  double value = 0.0;  // midpoint of the final bracket
  double lower = 0.0;
  double upper = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Spectral radius of a nonnegative square matrix by power iteration on
/// M + I with Collatz-Wielandt bracketing. `upper` is always a valid bound,
/// also when the iteration cap is hit on reducible matrices.
SpectralRadius spectral_radius(const Eigen::MatrixXd& m, double tolerance = 1e-12,
                               std::size_t max_iterations = 10000);

}  // namespace innoflow
