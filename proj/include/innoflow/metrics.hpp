#pragma once

// Node-pair similarity scores used as link predictors.

#include <optional>
#include <string>
#include <vector>

#include "innoflow/linalg.hpp"
#include "innoflow/netcore.hpp"
#include "innoflow/score_matrix.hpp"

namespace innoflow::metrics {

enum class Execution { serial, parallel };

/// Which neighborhood the local metrics use. `undirected`: Gamma(i) on the
/// symmetrized graph with weights w_ik + w_ki. `out`: out-neighbors with the
/// directed weights w_ik.
enum class Neighborhood { undirected, out };

/// w_ij / sum w. Throws DataError when the graph carries no weight.
ScoreMatrix pwa_score(const WeightedDigraph& g);

/// s_out_i * s_in_j / (sum w)^2.
ScoreMatrix pa_score(const WeightedDigraph& g);

double common_neighbors_w(const WeightedDigraph& g, NodeIndex i, NodeIndex j,
                          Neighborhood mode = Neighborhood::undirected);
double jaccard_w(const WeightedDigraph& g, NodeIndex i, NodeIndex j,
                 Neighborhood mode = Neighborhood::undirected);
/// Natural logarithm in the rarity weight. A common neighbor with no
/// neighborhood weight of its own (a sink in out mode) contributes 0.
double adamic_adar_w(const WeightedDigraph& g, NodeIndex i, NodeIndex j,
                     Neighborhood mode = Neighborhood::undirected);

enum class LocalMetric { common_neighbors, jaccard, adamic_adar };

/// All-pairs local metric. The serial path is the reference implementation;
/// the parallel path splits rows across OpenMP threads and must agree with
/// it exactly.
ScoreMatrix local_scores(const WeightedDigraph& g, LocalMetric metric,
                         Neighborhood mode = Neighborhood::undirected,
                         Execution exec = Execution::parallel);

struct KatzConfig {
  double beta = 20.0;
};

struct KatzResult {
  ScoreMatrix scores;  // S = (I - beta W)^-1 - I
  Eigen::MatrixXd walk_matrix;  // W = w / sum w
  SpectralRadius radius;  // of W
};

/// Throws NumericError naming the spectral radius when beta * rho(W) >= 1
/// (or cannot be certified below 1).
KatzResult katz(const WeightedDigraph& g, const KatzConfig& cfg);

struct KatzParts {
  Eigen::MatrixXd direct;    // beta W
  Eigen::MatrixXd indirect;  // S - beta W
};

KatzParts katz_decompose(const Eigen::MatrixXd& s, const Eigen::MatrixXd& w, double beta);

/// Names accepted by score_by_name: pwa, pa, common_neighbors, jaccard,
/// adamic_adar, katz, random.
const std::vector<std::string>& predictor_names();

struct PredictorOptions {
  KatzConfig katz;
  Neighborhood neighborhood = Neighborhood::undirected;
  std::uint64_t random_seed = 0;  // for the "random" baseline predictor
};

/// Scores every pair with the named predictor; mask is not applied here.
ScoreMatrix score_by_name(const std::string& name, const WeightedDigraph& g,
                          const PredictorOptions& options);

}  // namespace innoflow::metrics
