#pragma once

// Graph representations, temporal snapshots and structural statistics of
// weighted directed flow networks.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace innoflow {

using NodeIndex = std::size_t;
using Time = std::int64_t;

/// How an event's unit of innovation is spread over its flows.
/// `fractional`: each of k flows carries 1/k (one innovation counted once).
/// `unit`: each flow carries 1 (theory-validation mode of the simulator).
enum class WeightMode { fractional, unit };

std::string to_string(WeightMode mode);
WeightMode parse_weight_mode(const std::string& text);

struct EdgePair {
  NodeIndex source = 0;
  NodeIndex target = 0;
  auto operator<=>(const EdgePair&) const = default;
};

/// Inclusive time interval.
struct TimeInterval {
  Time first = 0;
  Time last = 0;
  bool contains(Time t) const { return first <= t && t <= last; }
};

class NodeUniverse {
 public:
  NodeUniverse() = default;
  /// `eligible_source` empty means every node is an eligible source.
  explicit NodeUniverse(std::vector<std::string> ids, std::vector<bool> eligible_source = {});

  /// Nodes named "n0", "n1", ...; the first `eligible_sources` are eligible.
  static NodeUniverse numbered(std::size_t n, std::size_t eligible_sources);

  std::size_t size() const { return ids_.size(); }
  const std::string& id(NodeIndex i) const { return ids_.at(i); }
  const std::vector<std::string>& ids() const { return ids_; }
  std::optional<NodeIndex> index_of(const std::string& id) const;
  bool is_eligible_source(NodeIndex i) const { return eligible_.at(i); }
  std::vector<NodeIndex> eligible_sources() const;

  /// Every (eligible source, any node) ordered pair, self-loops included,
  /// in lexicographic order.
  std::vector<EdgePair> eligible_pairs() const;

 private:
  std::vector<std::string> ids_;
  std::vector<bool> eligible_;
  std::unordered_map<std::string, NodeIndex> index_;
};

struct Flow {
  NodeIndex source = 0;
  NodeIndex target = 0;
};

/// One innovation: a time stamp and the distinct ordered pairs it feeds.
/// Observed data always has a single source per event; simulated events
/// may touch pairs with different sources.
struct Event {
  Time time = 0;
  std::vector<Flow> flows;
};

class TemporalEdgeLog {
 public:
  TemporalEdgeLog() = default;
  /// Validates: flows nonempty and distinct within an event, indices inside
  /// the universe, times nondecreasing. Throws DataError otherwise.
  TemporalEdgeLog(NodeUniverse nodes, std::vector<Event> events,
                  WeightMode mode = WeightMode::fractional);

  const NodeUniverse& nodes() const { return nodes_; }
  const std::vector<Event>& events() const { return events_; }
  WeightMode mode() const { return mode_; }
  bool empty() const { return events_.empty(); }
  std::size_t size() const { return events_.size(); }
  Time first_time() const;
  Time last_time() const;

  /// Weight carried by each flow of `event`.
  double flow_weight(const Event& event) const;

  /// Sorted distinct time stamps.
  std::vector<Time> times() const;

 private:
  NodeUniverse nodes_;
  std::vector<Event> events_;
  WeightMode mode_ = WeightMode::fractional;
};

/// Dense weighted digraph with cached strengths. Immutable.
class WeightedDigraph {
 public:
  WeightedDigraph() = default;
  /// Throws DataError for non-square, negative or non-finite weights.
  explicit WeightedDigraph(Eigen::MatrixXd weights);
  static WeightedDigraph zeros(std::size_t n);

  std::size_t size() const { return static_cast<std::size_t>(weights_.rows()); }
  double weight(NodeIndex i, NodeIndex j) const { return weights_(i, j); }
  const Eigen::MatrixXd& weights() const { return weights_; }
  const Eigen::VectorXd& out_strength() const { return s_out_; }
  const Eigen::VectorXd& in_strength() const { return s_in_; }
  double total_weight() const { return total_; }

 private:
  friend WeightedDigraph accumulate_flows(const TemporalEdgeLog&, const TimeInterval&);
  WeightedDigraph(Eigen::MatrixXd weights, Eigen::VectorXd s_out, Eigen::VectorXd s_in,
                  double total);

  Eigen::MatrixXd weights_;
  Eigen::VectorXd s_out_;
  Eigen::VectorXd s_in_;
  double total_ = 0.0;
};

/// Sum of flow weights of events whose time lies in `window`. Fractional
/// weights are accumulated exactly over a common denominator.
WeightedDigraph accumulate_flows(const TemporalEdgeLog& log, const TimeInterval& window);

/// Cumulative snapshot of all events with time <= until.
WeightedDigraph snapshot(const TemporalEdgeLog& log, Time until);

/// Number of events per source node in `period`. An event counts once for
/// every distinct source it contains.
Eigen::VectorXd period_counts(const TemporalEdgeLog& log, const TimeInterval& period);

struct CcdfPoint {
  double value = 0.0;
  double prob = 0.0;
};
using CcdfSeries = std::vector<CcdfPoint>;

/// Empirical P(X >= v) at each distinct v, ascending. Throws on empty input.
CcdfSeries ccdf(std::vector<double> values);

// Structural statistics run on the undirected unweighted projection:
// i ~ j iff i != j and w_ij + w_ji > 0.

struct ClusteringPoint {
  std::size_t degree = 0;
  std::optional<double> coefficient;  // empty for degree < 2
};

ClusteringPoint local_clustering(const WeightedDigraph& g, NodeIndex node);

/// Average local clustering per degree class, degree >= 2 only.
std::vector<std::pair<std::size_t, double>> clustering_spectrum(const WeightedDigraph& g);

/// 3 x triangles / connected triples. Throws NumericError without triples.
double global_transitivity(const WeightedDigraph& g);

struct Partition {
  std::vector<std::size_t> assignment;  // community id per node, ids 0..k-1
  double modularity = 0.0;
  std::size_t community_count() const;
};

/// Symmetrized weights w_ij + w_ji with the diagonal cleared.
Eigen::MatrixXd undirected_weights(const WeightedDigraph& g);

/// Weighted undirected modularity of `assignment` over symmetric `adjacency`.
double modularity(const Eigen::MatrixXd& adjacency, const std::vector<std::size_t>& assignment);

/// Agglomerative modularity maximization (Clauset-Newman-Moore). Returns the
/// partition at peak modularity. Ties go to the lowest (a, b) community pair.
Partition greedy_communities(const WeightedDigraph& g);

}  // namespace innoflow
