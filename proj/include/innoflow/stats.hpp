#pragma once

// Regression kernels: OLS with classic / HC1 / clustered covariance, the
// within (fixed-effects) estimator, logit by IRLS, and the estimation
// designs built on edge logs.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "innoflow/econ.hpp"
#include "innoflow/netcore.hpp"
#include "innoflow/predict.hpp"

namespace innoflow::stats {

enum class SeType { classic, hc1, cluster };

std::string to_string(SeType se);
SeType parse_se_type(const std::string& text);

struct DesignMatrix {
  std::vector<std::string> names;  // one per column of x
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  std::vector<std::int64_t> groups;  // cluster labels; empty when unused

  std::size_t rows() const { return static_cast<std::size_t>(x.rows()); }
  /// Prepends a column of ones named "const".
  DesignMatrix with_intercept() const;
  /// Throws DataError on shape mismatches or non-finite entries.
  void validate() const;
};

struct RegressionResult {
  std::string model;
  std::vector<std::string> names;
  Eigen::VectorXd coefficients;
  Eigen::MatrixXd covariance;
  SeType se_type = SeType::classic;
  double r_squared = 0.0;  // McFadden for logit, within R^2 for fixed effects
  std::size_t n_obs = 0;
  std::size_t dropped_singletons = 0;
  double log_likelihood = 0.0;  // logit only
  std::size_t iterations = 0;   // logit only
  std::vector<std::string> warnings;

  Eigen::VectorXd standard_errors() const;
  double coefficient(const std::string& name) const;
  double standard_error(const std::string& name) const;
  std::size_t index_of(const std::string& name) const;
};

/// Least squares by column-pivoted QR (threshold 1e-12). Rank deficiency
/// throws NumericError naming the collinear columns. R^2 is centered when a
/// "const" column is present, uncentered otherwise.
RegressionResult ols(const DesignMatrix& design, SeType se = SeType::classic);

/// Within estimator: demeans by `units` and adds one dummy block per entry
/// of `dummy_factors` (first level dropped). Units with a single observation
/// are dropped and counted. `design` must not carry an intercept. Dummy
/// columns are named "<factor name>=<level>" (factor names default to f0,
/// f1, ...).
RegressionResult fixed_effects(const DesignMatrix& design, const std::vector<std::int64_t>& units,
                               const std::vector<std::vector<std::int64_t>>& dummy_factors = {},
                               SeType se = SeType::classic,
                               const std::vector<std::string>& factor_names = {});

/// Logistic regression by IRLS until the log-likelihood changes by less than
/// 1e-10 (100 iterations at most). Separation and non-convergence throw
/// NumericError.
RegressionResult logit(const DesignMatrix& design, SeType se = SeType::classic);

namespace detail {
/// OLS with `absorbed` extra parameters removed from the residual degrees
/// of freedom (fixed effects swept out before the call).
RegressionResult ols_absorbed(const DesignMatrix& design, SeType se, std::size_t absorbed);
}  // namespace detail

// ---------------------------------------------------------------- designs

enum class KernelStep { weight_classes, pairwise };
enum class Step2Sample { positive, universe };

struct TwoStepOptions {
  KernelStep step1 = KernelStep::weight_classes;
  /// Time units merged into one step-1 window; 0 picks about 80 windows
  /// over the span of the log.
  Time kernel_window = 0;
  Step2Sample step2 = Step2Sample::positive;
  SeType se = SeType::hc1;
  /// Events stamped before this only build up prior weights.
  Time fit_from = 0;
};

struct TwoStepFit {
  double lambda_hat = 0.0;
  double alpha_hat = 0.0;
  RegressionResult step1;
  RegressionResult step2;
  std::size_t windows = 0;
};

/// Step 1 estimates the kernel exponent from flows against prior weights;
/// step 2 regresses relative flows dw_ij / dw on w_ij^lambda / sum w^lambda
/// and reads alpha off the slope. Pairs are the eligible-source universe.
TwoStepFit two_step_pwa_fit(const TemporalEdgeLog& log, const TwoStepOptions& options = {});

/// Step 1 run separately per window, for diagnostics.
std::vector<std::pair<Time, double>> per_window_lambda(const TemporalEdgeLog& log,
                                                       const TwoStepOptions& options);

enum class EvolutionSpec { linear, logit, loglog };
enum class Effects { none, fixed };

EvolutionSpec parse_evolution_spec(const std::string& text);
Effects parse_effects(const std::string& text);

struct EvolutionOptions {
  EvolutionSpec spec = EvolutionSpec::linear;
  Effects effects = Effects::none;
  Time period_length = 1;
  SeType se = SeType::hc1;
  bool time_dummies = false;
};

/// Pair-period panel over the eligible universe: relative flow in period t
/// on the lagged relative weight w_ij / sum w and the proximity values
/// z_ij. `linear` runs OLS, `logit` models the presence of flow, `loglog`
/// keeps pairs with positive flow and weight and logs both. Fixed effects
/// are sender (absorbed) and receiver (dummies). All-zero proximity
/// regressors are dropped with a warning and reported with coefficient 0.
RegressionResult evolution_regression(const TemporalEdgeLog& log,
                                      const std::vector<econ::ProximityMatrix>& proximities,
                                      const EvolutionOptions& options);

struct StimulusOptions {
  Effects effects = Effects::none;
  bool time_dummies = false;
  SeType se = SeType::hc1;
};

/// log(1+X) on log(1+Xf) and log(1+Xb).
RegressionResult stimulus_regression(const predict::StimulusPanel& panel,
                                     const StimulusOptions& options);

}  // namespace innoflow::stats
