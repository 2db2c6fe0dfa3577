#include "innoflow/linalg.hpp"

#include <algorithm>
#include <limits>

#include "innoflow/error.hpp"

namespace innoflow {

SpectralRadius spectral_radius(const Eigen::MatrixXd& m, double tolerance,
                               std::size_t max_iterations) {
  if (m.rows() != m.cols()) throw UsageError("spectral radius of a non-square matrix");
  if ((m.array() < 0.0).any()) throw UsageError("spectral radius routine needs a nonnegative matrix");
  SpectralRadius out;
  const Eigen::Index n = m.rows();
  if (n == 0) {
    out.converged = true;
    return out;
  }
  // The unit shift keeps every iterate strictly positive and removes
  // periodicity; rho(M + I) = rho(M) + 1 for nonnegative M.
  Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  for (std::size_t it = 1; it <= max_iterations; ++it) {
    const Eigen::VectorXd y = m * x + x;
    const Eigen::ArrayXd ratio = y.array() / x.array();
    lower = std::max(lower, ratio.minCoeff() - 1.0);
    upper = std::min(upper, ratio.maxCoeff() - 1.0);
    x = y / y.maxCoeff();
    out.iterations = it;
    if (upper - lower <= tolerance * std::max(1.0, upper)) {
      out.converged = true;
      break;
    }
  }
  out.lower = std::max(0.0, lower);
  out.upper = std::max(0.0, upper);
  out.value = 0.5 * (out.lower + out.upper);
  return out;
}

}  // namespace innoflow
