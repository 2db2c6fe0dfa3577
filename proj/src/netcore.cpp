#include "innoflow/netcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "innoflow/error.hpp"

namespace innoflow {

std::string to_string(WeightMode mode) {
  return mode == WeightMode::unit ? "unit" : "fractional";
}

WeightMode parse_weight_mode(const std::string& text) {
  if (text == "fractional") return WeightMode::fractional;
  if (text == "unit") return WeightMode::unit;
  throw UsageError("unknown weight mode '" + text + "' (expected fractional|unit)");
}

// ---------------------------------------------------------------- universe

NodeUniverse::NodeUniverse(std::vector<std::string> ids, std::vector<bool> eligible_source)
    : ids_(std::move(ids)), eligible_(std::move(eligible_source)) {
  if (eligible_.empty()) eligible_.assign(ids_.size(), true);
  if (eligible_.size() != ids_.size())
    throw DataError("node universe: eligibility flags do not match node count");
  for (NodeIndex i = 0; i < ids_.size(); ++i) {
    if (ids_[i].empty()) throw DataError("node universe: empty node id");
    if (!index_.emplace(ids_[i], i).second)
      throw DataError("node universe: duplicate node id '" + ids_[i] + "'");
  }
}

NodeUniverse NodeUniverse::numbered(std::size_t n, std::size_t eligible_sources) {
  std::vector<std::string> ids(n);
  std::vector<bool> eligible(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    ids[i] = "n" + std::to_string(i);
    eligible[i] = i < eligible_sources;
  }
  return NodeUniverse(std::move(ids), std::move(eligible));
}

std::optional<NodeIndex> NodeUniverse::index_of(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<NodeIndex> NodeUniverse::eligible_sources() const {
  std::vector<NodeIndex> out;
  for (NodeIndex i = 0; i < size(); ++i)
    if (eligible_[i]) out.push_back(i);
  return out;
}

std::vector<EdgePair> NodeUniverse::eligible_pairs() const {
  std::vector<EdgePair> out;
  for (NodeIndex i = 0; i < size(); ++i) {
    if (!eligible_[i]) continue;
    for (NodeIndex j = 0; j < size(); ++j) out.push_back({i, j});
  }
  return out;
}

// ---------------------------------------------------------------- edge log

TemporalEdgeLog::TemporalEdgeLog(NodeUniverse nodes, std::vector<Event> events, WeightMode mode)
    : nodes_(std::move(nodes)), events_(std::move(events)), mode_(mode) {
  const std::size_t n = nodes_.size();
  for (std::size_t e = 0; e < events_.size(); ++e) {
    const Event& ev = events_[e];
    if (ev.flows.empty()) throw DataError("event " + std::to_string(e) + " has no flows");
    if (e > 0 && ev.time < events_[e - 1].time)
      throw DataError("event " + std::to_string(e) + " is out of time order");
    std::set<std::pair<NodeIndex, NodeIndex>> seen;
    for (const Flow& f : ev.flows) {
      if (f.source >= n || f.target >= n)
        throw DataError("event " + std::to_string(e) + " references a node outside the universe");
      if (!seen.emplace(f.source, f.target).second)
        throw DataError("event " + std::to_string(e) + " repeats the pair " + nodes_.id(f.source) +
                        "->" + nodes_.id(f.target));
    }
  }
}

Time TemporalEdgeLog::first_time() const {
  if (events_.empty()) throw DataError("edge log is empty");
  return events_.front().time;
}

Time TemporalEdgeLog::last_time() const {
  if (events_.empty()) throw DataError("edge log is empty");
  return events_.back().time;
}

double TemporalEdgeLog::flow_weight(const Event& event) const {
  return mode_ == WeightMode::unit ? 1.0 : 1.0 / static_cast<double>(event.flows.size());
}

std::vector<Time> TemporalEdgeLog::times() const {
  std::vector<Time> out;
  for (const Event& ev : events_)
    if (out.empty() || out.back() != ev.time) out.push_back(ev.time);
  return out;
}

// ---------------------------------------------------------------- digraph

WeightedDigraph::WeightedDigraph(Eigen::MatrixXd weights) : weights_(std::move(weights)) {
  if (weights_.rows() != weights_.cols()) throw DataError("weight matrix is not square");
  for (Eigen::Index i = 0; i < weights_.rows(); ++i)
    for (Eigen::Index j = 0; j < weights_.cols(); ++j) {
      const double w = weights_(i, j);
      if (!std::isfinite(w) || w < 0.0)
        throw DataError("weight (" + std::to_string(i) + "," + std::to_string(j) +
                        ") is negative or not finite");
    }
  s_out_ = weights_.rowwise().sum();
  s_in_ = weights_.colwise().sum().transpose();
  total_ = weights_.sum();
}

WeightedDigraph::WeightedDigraph(Eigen::MatrixXd weights, Eigen::VectorXd s_out,
                                 Eigen::VectorXd s_in, double total)
    : weights_(std::move(weights)), s_out_(std::move(s_out)), s_in_(std::move(s_in)),
      total_(total) {}

WeightedDigraph WeightedDigraph::zeros(std::size_t n) {
  const auto m = static_cast<Eigen::Index>(n);
  return WeightedDigraph(Eigen::MatrixXd::Zero(m, m));
}

WeightedDigraph accumulate_flows(const TemporalEdgeLog& log, const TimeInterval& window) {
  const auto n = static_cast<Eigen::Index>(log.nodes().size());

  // Common denominator of all fan-outs in the window.
  constexpr std::int64_t kMaxDenominator = std::int64_t{1} << 40;
  std::int64_t denom = 1;
  bool exact = true;
  if (log.mode() == WeightMode::fractional) {
    for (const Event& ev : log.events()) {
      if (!window.contains(ev.time)) continue;
      denom = std::lcm(denom, static_cast<std::int64_t>(ev.flows.size()));
      if (denom > kMaxDenominator) {
        exact = false;
        break;
      }
    }
  }

  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  if (exact) {
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> units =
        Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
    for (const Event& ev : log.events()) {
      if (!window.contains(ev.time)) continue;
      const std::int64_t share =
          log.mode() == WeightMode::unit ? 1 : denom / static_cast<std::int64_t>(ev.flows.size());
      for (const Flow& f : ev.flows) units(f.source, f.target) += share;
    }
    const auto d = static_cast<double>(denom);
    w = units.cast<double>() / d;
    Eigen::VectorXd s_out = units.rowwise().sum().cast<double>() / d;
    Eigen::VectorXd s_in = units.colwise().sum().transpose().cast<double>() / d;
    const double total = static_cast<double>(units.sum()) / d;
    return WeightedDigraph(std::move(w), std::move(s_out), std::move(s_in), total);
  }

  for (const Event& ev : log.events()) {
    if (!window.contains(ev.time)) continue;
    const double share = log.flow_weight(ev);
    for (const Flow& f : ev.flows) w(f.source, f.target) += share;
  }
  return WeightedDigraph(std::move(w));
}

WeightedDigraph snapshot(const TemporalEdgeLog& log, Time until) {
  return accumulate_flows(log, {std::numeric_limits<Time>::min(), until});
}

Eigen::VectorXd period_counts(const TemporalEdgeLog& log, const TimeInterval& period) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(log.nodes().size()));
  std::vector<NodeIndex> sources;
  for (const Event& ev : log.events()) {
    if (!period.contains(ev.time)) continue;
    sources.clear();
    for (const Flow& f : ev.flows) sources.push_back(f.source);
    std::sort(sources.begin(), sources.end());
    sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
    for (NodeIndex s : sources) x[static_cast<Eigen::Index>(s)] += 1.0;
  }
  return x;
}

CcdfSeries ccdf(std::vector<double> values) {
  if (values.empty()) throw DataError("ccdf of an empty sample");
  std::sort(values.begin(), values.end());
  const auto count = static_cast<double>(values.size());
  CcdfSeries out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0 && values[i] == values[i - 1]) continue;
    out.push_back({values[i], static_cast<double>(values.size() - i) / count});
  }
  return out;
}

// ---------------------------------------------------------------- structure

namespace {

std::vector<std::vector<NodeIndex>> neighbor_lists(const WeightedDigraph& g) {
  const std::size_t n = g.size();
  std::vector<std::vector<NodeIndex>> adj(n);
  for (NodeIndex i = 0; i < n; ++i)
    for (NodeIndex j = 0; j < n; ++j)
      if (i != j && g.weight(i, j) + g.weight(j, i) > 0.0) adj[i].push_back(j);
  return adj;
}

bool linked(const WeightedDigraph& g, NodeIndex a, NodeIndex b) {
  return a != b && g.weight(a, b) + g.weight(b, a) > 0.0;
}

// Links among the neighbors of `node`.
std::size_t closed_pairs(const WeightedDigraph& g, const std::vector<NodeIndex>& nbrs) {
  std::size_t links = 0;
  for (std::size_t a = 0; a < nbrs.size(); ++a)
    for (std::size_t b = a + 1; b < nbrs.size(); ++b)
      if (linked(g, nbrs[a], nbrs[b])) ++links;
  return links;
}

}  // namespace

ClusteringPoint local_clustering(const WeightedDigraph& g, NodeIndex node) {
  if (node >= g.size()) throw UsageError("node index out of range");
  std::vector<NodeIndex> nbrs;
  for (NodeIndex j = 0; j < g.size(); ++j)
    if (linked(g, node, j)) nbrs.push_back(j);
  ClusteringPoint out;
  out.degree = nbrs.size();
  if (out.degree < 2) return out;
  const auto k = static_cast<double>(out.degree);
  out.coefficient = 2.0 * static_cast<double>(closed_pairs(g, nbrs)) / (k * (k - 1.0));
  return out;
}

std::vector<std::pair<std::size_t, double>> clustering_spectrum(const WeightedDigraph& g) {
  std::map<std::size_t, std::pair<double, std::size_t>> by_degree;
  for (NodeIndex i = 0; i < g.size(); ++i) {
    const ClusteringPoint p = local_clustering(g, i);
    if (!p.coefficient) continue;
    auto& slot = by_degree[p.degree];
    slot.first += *p.coefficient;
    slot.second += 1;
  }
  std::vector<std::pair<std::size_t, double>> out;
  for (const auto& [k, acc] : by_degree)
    out.emplace_back(k, acc.first / static_cast<double>(acc.second));
  return out;
}

double global_transitivity(const WeightedDigraph& g) {
  const auto adj = neighbor_lists(g);
  std::size_t closed = 0;
  std::size_t triples = 0;
  for (const auto& nbrs : adj) {
    const std::size_t k = nbrs.size();
    triples += k * (k - (k > 0 ? 1 : 0)) / 2;
    closed += closed_pairs(g, nbrs);
  }
  if (triples == 0) throw NumericError("transitivity undefined: graph has no connected triple");
  return static_cast<double>(closed) / static_cast<double>(triples);
}

std::size_t Partition::community_count() const {
  if (assignment.empty()) return 0;
  return *std::max_element(assignment.begin(), assignment.end()) + 1;
}

Eigen::MatrixXd undirected_weights(const WeightedDigraph& g) {
  Eigen::MatrixXd a = g.weights() + g.weights().transpose();
  a.diagonal().setZero();
  return a;
}

double modularity(const Eigen::MatrixXd& adjacency, const std::vector<std::size_t>& assignment) {
  const Eigen::Index n = adjacency.rows();
  if (static_cast<std::size_t>(n) != assignment.size())
    throw UsageError("modularity: assignment size does not match the graph");
  const double two_m = adjacency.sum();
  if (two_m <= 0.0) throw NumericError("modularity undefined for a graph without edges");
  const Eigen::VectorXd k = adjacency.rowwise().sum();
  double q = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (assignment[i] == assignment[j]) q += adjacency(i, j) - k[i] * k[j] / two_m;
  return q / two_m;
}

namespace {

std::vector<std::size_t> relabel(const std::vector<std::size_t>& raw) {
  std::map<std::size_t, std::size_t> ids;
  std::vector<std::size_t> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto it = ids.try_emplace(raw[i], ids.size()).first;
    out[i] = it->second;
  }
  return out;
}

}  // namespace

Partition greedy_communities(const WeightedDigraph& g) {
  const std::size_t n = g.size();
  if (n == 0) throw DataError("community detection on an empty graph");
  const Eigen::MatrixXd adjacency = undirected_weights(g);
  const double two_m = adjacency.sum();
  if (two_m <= 0.0) throw DataError("community detection on a graph without edges");

  // e(a, b): fraction of edge ends joining communities a and b.
  Eigen::MatrixXd e = adjacency / two_m;
  Eigen::VectorXd a = e.rowwise().sum();
  std::vector<bool> active(n, true);
  std::vector<std::size_t> community(n);
  std::iota(community.begin(), community.end(), std::size_t{0});

  double q = -a.squaredNorm();
  double best_q = q;
  std::vector<std::size_t> best = community;
  constexpr double kTie = 1e-14;

  for (;;) {
    std::optional<std::pair<std::size_t, std::size_t>> pick;
    double best_dq = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!active[j] || e(i, j) <= 0.0) continue;
        const double dq = 2.0 * (e(i, j) - a[i] * a[j]);
        if (dq > best_dq + kTie) {
          best_dq = dq;
          pick = std::make_pair(i, j);
        }
      }
    }
    if (!pick) break;
    const auto [keep, drop] = *pick;
    e.row(keep) += e.row(drop);
    e.col(keep) += e.col(drop);
    e.row(drop).setZero();
    e.col(drop).setZero();
    a[keep] += a[drop];
    a[drop] = 0.0;
    active[drop] = false;
    for (auto& c : community)
      if (c == drop) c = keep;
    q += best_dq;
    if (q > best_q + 1e-12) {
      best_q = q;
      best = community;
    }
  }

  Partition out;
  out.assignment = relabel(best);
  out.modularity = modularity(adjacency, out.assignment);
  return out;
}

}  // namespace innoflow
