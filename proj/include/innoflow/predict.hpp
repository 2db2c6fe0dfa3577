#pragma once

// Top-N link prediction scoring and network-stimulus predictors.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "innoflow/metrics.hpp"
#include "innoflow/netcore.hpp"
#include "innoflow/score_matrix.hpp"

namespace innoflow::predict {

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;
  std::size_t total() const { return tp + fp + tn + fn; }
};

/// The N highest-scoring eligible pairs. Equal scores rank by (source,
/// target) ascending. Throws UsageError when N exceeds the eligible count.
std::vector<EdgePair> top_n(const ScoreMatrix& scores, std::size_t n);

/// Throws DataError if pred or actual leave the universe, or the universe
/// is empty.
ConfusionCounts confusion(const std::vector<EdgePair>& pred, const std::vector<EdgePair>& actual,
                          const std::vector<EdgePair>& universe);

double accuracy(const ConfusionCounts& c);
double accuracy(const std::vector<EdgePair>& pred, const std::vector<EdgePair>& actual,
                const std::vector<EdgePair>& universe);

/// |pred & actual| / |pred|. Throws UsageError on an empty prediction.
double precision(const std::vector<EdgePair>& pred, const std::vector<EdgePair>& actual);

struct RollingOptions {
  std::vector<std::string> predictors = {"pwa", "pa", "common_neighbors", "jaccard",
                                         "adamic_adar", "katz"};
  metrics::PredictorOptions predictor_options;
  /// Time stamps merged into one evaluation period, left-aligned at the
  /// log's first time.
  Time period_length = 1;
  std::optional<Time> first_period_start;  // default: second period
  std::optional<Time> last_period_start;
};

struct RollingRow {
  Time period_start = 0;
  Time period_end = 0;
  std::string predictor;
  std::size_t n = 0;          // events in the period, capped at the universe size
  std::size_t universe = 0;   // eligible pairs
  std::size_t actual = 0;     // pairs with positive new flow
  ConfusionCounts counts;
  double accuracy = 0.0;
  double precision = 0.0;
};

struct RollingReport {
  std::vector<RollingRow> rows;  // ordered by period, then predictor order
  std::vector<std::string> notes;
};

/// For each period t: snapshot through the end of t-1, score, predict the
/// top N pairs with N = events in t, compare with pairs receiving positive
/// flow in t. Universe = eligible sources x all nodes. Periods without
/// events are skipped with a note. Cells run in parallel.
RollingReport rolling_eval(const TemporalEdgeLog& log, const RollingOptions& options);

/// Xf_i = sum_j (w_ji / s_out_j) X_j; suppliers without out-strength add 0.
Eigen::VectorXd stimulus_forward(const WeightedDigraph& g, const Eigen::VectorXd& x_prev);

/// Xb_i = sum_j (w_ij / s_in_j) X_j; users without in-strength add 0.
Eigen::VectorXd stimulus_backward(const WeightedDigraph& g, const Eigen::VectorXd& x_prev);

struct StimulusRow {
  NodeIndex industry = 0;
  std::size_t period = 0;  // 0-based period index
  Time period_start = 0;
  double x = 0.0;          // innovations in the period
  double x_forward = 0.0;  // expected from forward linkages
  double x_backward = 0.0;
};

struct StimulusPanel {
  NodeUniverse nodes;
  std::vector<StimulusRow> rows;
};

/// Periods of `period_length` time units, left-aligned at the first event,
/// trailing short period kept. For each period T >= 1 (0-based) and each
/// eligible source: X from T, predictors from the network through the end
/// of T-1 combined with counts of T-1. Needs at least two periods.
StimulusPanel stimulus_panel(const TemporalEdgeLog& log, Time period_length);

/// Period boundaries used by stimulus_panel and rolling_eval.
std::vector<TimeInterval> periods(const TemporalEdgeLog& log, Time period_length);

}  // namespace innoflow::predict
