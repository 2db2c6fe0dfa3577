#pragma once

// Preferential weight assignment: the mixed random / preferential process
// that assigns each new innovation to ordered industry pairs, and the
// closed-form weight distributions it implies.

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "innoflow/netcore.hpp"
#include "innoflow/score_matrix.hpp"

namespace innoflow::pwa {

struct SimConfig {
  double alpha = 1.0;   // preferential share
  double lambda = 1.0;  // kernel exponent
  std::size_t m = 1;    // distinct pairs per innovation
  NodeUniverse nodes;
  std::vector<EdgePair> edge_universe;
  std::size_t horizon = 1;  // number of innovations
  std::uint64_t seed = 0;
  WeightMode weight_mode = WeightMode::fractional;
  // Innovation k (0-based) is stamped with time 1 + k / events_per_period.
  std::size_t events_per_period = 1;
  // Optional history the run starts from. These events set the initial
  // weights, are copied to the front of the output, and simulated times
  // continue after the last of them. Flows must lie in the universe.
  std::vector<Event> warm_start;

  /// Throws UsageError on parameters outside their domain.
  void validate() const;
};

/// 98 industries of which the first 65 are eligible sources (6370 pairs),
/// alpha 0.855, lambda 0.649, m 2, fractional weights.
SimConfig sweden_profile();

/// Probability that the next innovation lands on each universe pair:
/// positive pairs share alpha in proportion to w^lambda, zero pairs share
/// 1 - alpha uniformly. All-zero weights give 1/A everywhere; without zero
/// pairs the positive pairs take all mass.
ScoreMatrix pwa_edge_probabilities(const WeightedDigraph& g, double alpha, double lambda,
                                   const std::vector<EdgePair>& universe);

/// Runs the process for `horizon` innovations. Each innovation draws m
/// distinct pairs without replacement from the probabilities frozen at the
/// start of the step. Deterministic in the seed.
TemporalEdgeLog simulate(const SimConfig& config);

/// Independent runs seeded seed, seed + 1, ...; runs in parallel.
std::vector<TemporalEdgeLog> simulate_replicates(const SimConfig& config, std::size_t count);

/// Edge count per weight value over the universe, zero weights included.
struct WeightHistogram {
  std::map<double, std::size_t> bins;
  std::size_t total_edges = 0;
  std::size_t positive_edges() const;
};

WeightHistogram weight_histogram(const WeightedDigraph& g, const std::vector<EdgePair>& universe);

/// mu = sum_w w^lambda N_w / N over positive pairs of the final snapshot.
double estimate_mu(const TemporalEdgeLog& log, double lambda);

/// kappa = (1 - alpha) m mu / alpha, the stretched-exponential rate.
double stretched_kappa(double alpha, double m, double mu);

/// C * w^(-1/alpha).
struct PowerLawTail {
  double alpha = 1.0;
  double scale = 1.0;
  double exponent() const { return -1.0 / alpha; }
  double operator()(double w) const;
};

/// C * exp(-kappa * w^(1-lambda) / (1-lambda)).
struct StretchedExponentialTail {
  double lambda = 0.5;
  double kappa = 1.0;
  double scale = 1.0;
  double operator()(double w) const;
};

PowerLawTail theoretical_ccdf_linear(double alpha, double scale);

/// Valid only for lambda in [0.5, 1), where the series truncates to its
/// first term.
StretchedExponentialTail theoretical_ccdf_sublinear(double lambda, double kappa, double scale);

/// Stationary master-equation distribution for the kernel w^lambda:
/// P(w) proportional to w^-lambda prod_{j<=w} j^lambda / (c + j^lambda),
/// c = (1-alpha) m mu / alpha, normalized over w = 1..w_max.
std::vector<double> master_equation_pmf(double alpha, double lambda, double m, double mu,
                                        std::size_t w_max);

/// Linear-kernel solution w^-1 Gamma(w+1) / Gamma(c+w+1), normalized over
/// w = 1..w_max.
std::vector<double> linear_gamma_pmf(double alpha, double m, double mu, std::size_t w_max);

/// Least-squares line through transformed CCDF points.
struct TailFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

/// log P on log w over points with value >= w_min.
TailFit fit_power_law_tail(const CcdfSeries& series, double w_min);

/// log P on w^(1-lambda) over points with value >= w_min. A straight line
/// marks a stretched-exponential tail; -slope estimates kappa / (1-lambda).
TailFit fit_stretched_tail(const CcdfSeries& series, double lambda, double w_min);

/// Scale C minimizing squared log error of C * shape(w) against the CCDF
/// points with value >= w_min, where `shape` is the unit-scale curve.
template <class Curve>
double fit_scale(const CcdfSeries& series, const Curve& shape, double w_min);

/// CCDF of positive weights over the universe pairs.
CcdfSeries weight_ccdf(const WeightedDigraph& g, const std::vector<EdgePair>& universe);

}  // namespace innoflow::pwa

#include "innoflow/pwa_inl.hpp"
