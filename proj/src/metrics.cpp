#include "innoflow/metrics.hpp"

#include <cmath>
#include <sstream>

#include "innoflow/error.hpp"
#include "innoflow/random.hpp"

namespace innoflow::metrics {

namespace {

ScoreMatrix make_scores(std::string name, Eigen::MatrixXd scores) {
  ScoreMatrix out;
  out.predictor = std::move(name);
  out.eligible = BoolMatrix::Constant(scores.rows(), scores.cols(), true);
  out.scores = std::move(scores);
  return out;
}

void require_weight(const WeightedDigraph& g, const char* what) {
  if (!(g.total_weight() > 0.0))
    throw DataError(std::string(what) + " needs a graph with positive total weight");
}

Eigen::MatrixXd neighborhood_weights(const WeightedDigraph& g, Neighborhood mode) {
  Eigen::MatrixXd nw = mode == Neighborhood::undirected
                           ? Eigen::MatrixXd(g.weights() + g.weights().transpose())
                           : g.weights();
  nw.diagonal().setZero();
  return nw;
}

void check_pair(const WeightedDigraph& g, NodeIndex i, NodeIndex j) {
  if (i >= g.size() || j >= g.size()) throw UsageError("node index out of range");
}

// Per-pair kernels over a precomputed neighborhood matrix.
double cn_kernel(const Eigen::MatrixXd& nw, Eigen::Index i, Eigen::Index j) {
  double sum = 0.0;
  for (Eigen::Index k = 0; k < nw.cols(); ++k)
    if (nw(i, k) > 0.0 && nw(j, k) > 0.0) sum += nw(i, k) + nw(j, k);
  return sum;
}

double jaccard_kernel(const Eigen::MatrixXd& nw, const Eigen::VectorXd& strength, Eigen::Index i,
                      Eigen::Index j) {
  const double denom = strength[i] + strength[j];
  if (denom <= 0.0) return 0.0;
  return cn_kernel(nw, i, j) / denom;
}

double aa_kernel(const Eigen::MatrixXd& nw, const Eigen::VectorXd& strength, Eigen::Index i,
                 Eigen::Index j) {
  double sum = 0.0;
  for (Eigen::Index k = 0; k < nw.cols(); ++k)
    // in out mode k can be a sink; its rarity is undefined, so it adds nothing
    if (nw(i, k) > 0.0 && nw(j, k) > 0.0 && strength[k] > 0.0)
      sum += (nw(i, k) + nw(j, k)) / std::log1p(strength[k]);
  return sum;
}

}  // namespace

ScoreMatrix pwa_score(const WeightedDigraph& g) {
  require_weight(g, "pwa score");
  return make_scores("pwa", g.weights() / g.total_weight());
}

ScoreMatrix pa_score(const WeightedDigraph& g) {
  require_weight(g, "pa score");
  const double t2 = g.total_weight() * g.total_weight();
  return make_scores("pa", g.out_strength() * g.in_strength().transpose() / t2);
}

double common_neighbors_w(const WeightedDigraph& g, NodeIndex i, NodeIndex j, Neighborhood mode) {
  check_pair(g, i, j);
  return cn_kernel(neighborhood_weights(g, mode), static_cast<Eigen::Index>(i),
                   static_cast<Eigen::Index>(j));
}

double jaccard_w(const WeightedDigraph& g, NodeIndex i, NodeIndex j, Neighborhood mode) {
  check_pair(g, i, j);
  const Eigen::MatrixXd nw = neighborhood_weights(g, mode);
  const Eigen::VectorXd strength = nw.rowwise().sum();
  return jaccard_kernel(nw, strength, static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
}

double adamic_adar_w(const WeightedDigraph& g, NodeIndex i, NodeIndex j, Neighborhood mode) {
  check_pair(g, i, j);
  const Eigen::MatrixXd nw = neighborhood_weights(g, mode);
  const Eigen::VectorXd strength = nw.rowwise().sum();
  return aa_kernel(nw, strength, static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
}

ScoreMatrix local_scores(const WeightedDigraph& g, LocalMetric metric, Neighborhood mode,
                         Execution exec) {
  const Eigen::MatrixXd nw = neighborhood_weights(g, mode);
  const Eigen::VectorXd strength = nw.rowwise().sum();
  const Eigen::Index n = nw.rows();
  Eigen::MatrixXd s(n, n);
  const bool parallel = exec == Execution::parallel;
#pragma omp parallel for schedule(static) if (parallel)
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      switch (metric) {
        case LocalMetric::common_neighbors:
          s(i, j) = cn_kernel(nw, i, j);
          break;
        case LocalMetric::jaccard:
          s(i, j) = jaccard_kernel(nw, strength, i, j);
          break;
        case LocalMetric::adamic_adar:
          s(i, j) = aa_kernel(nw, strength, i, j);
          break;
      }
    }
  }
  const char* name = metric == LocalMetric::common_neighbors ? "common_neighbors"
                     : metric == LocalMetric::jaccard        ? "jaccard"
                                                             : "adamic_adar";
  return make_scores(name, std::move(s));
}

KatzResult katz(const WeightedDigraph& g, const KatzConfig& cfg) {
  if (!(cfg.beta > 0.0)) throw UsageError("katz beta must be positive");
  const Eigen::Index n = static_cast<Eigen::Index>(g.size());
  KatzResult out;
  out.walk_matrix = g.total_weight() > 0.0 ? Eigen::MatrixXd(g.weights() / g.total_weight())
                                           : Eigen::MatrixXd::Zero(n, n);
  out.radius = spectral_radius(out.walk_matrix);
  if (cfg.beta * out.radius.upper >= 1.0) {
    std::ostringstream msg;
    msg << "katz beta " << cfg.beta << " is invalid: spectral radius of W is " << out.radius.value
        << " (upper bound " << out.radius.upper << "), beta * rho must stay below 1";
    throw NumericError(msg.str());
  }
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd resolvent = (id - cfg.beta * out.walk_matrix).partialPivLu().solve(id);
  out.scores = make_scores("katz", resolvent - id);
  return out;
}

KatzParts katz_decompose(const Eigen::MatrixXd& s, const Eigen::MatrixXd& w, double beta) {
  if (s.rows() != w.rows() || s.cols() != w.cols() || s.rows() != s.cols())
    throw UsageError("katz_decompose: S and W must be square matrices of one size");
  if (!(beta > 0.0)) throw UsageError("katz_decompose: beta must be positive");
  KatzParts parts;
  parts.direct = beta * w;
  parts.indirect = s - parts.direct;
  return parts;
}

const std::vector<std::string>& predictor_names() {
  static const std::vector<std::string> names = {"pwa",     "pa",          "common_neighbors",
                                                 "jaccard", "adamic_adar", "katz",
                                                 "random"};
  return names;
}

ScoreMatrix score_by_name(const std::string& name, const WeightedDigraph& g,
                          const PredictorOptions& options) {
  if (name == "pwa") return pwa_score(g);
  if (name == "pa") return pa_score(g);
  if (name == "common_neighbors")
    return local_scores(g, LocalMetric::common_neighbors, options.neighborhood);
  if (name == "jaccard") return local_scores(g, LocalMetric::jaccard, options.neighborhood);
  if (name == "adamic_adar") return local_scores(g, LocalMetric::adamic_adar, options.neighborhood);
  if (name == "katz") return katz(g, options.katz).scores;
  if (name == "random") {
    Rng rng(options.random_seed);
    const auto n = static_cast<Eigen::Index>(g.size());
    Eigen::MatrixXd s(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) s(i, j) = rng.uniform();
    return make_scores("random", std::move(s));
  }
  throw UsageError("unknown predictor '" + name + "'");
}

}  // namespace innoflow::metrics
