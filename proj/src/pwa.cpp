#include "innoflow/pwa.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "innoflow/error.hpp"
#include "innoflow/random.hpp"

namespace innoflow::pwa {

namespace {

// Binary indexed tree over nonnegative doubles with weighted lookup.
class Fenwick {
 public:
  explicit Fenwick(std::size_t n) : tree_(n + 1, 0.0), values_(n, 0.0) {
    top_ = 1;
    while (top_ * 2 <= n) top_ *= 2;
  }

  double value(std::size_t i) const { return values_[i]; }

  void set(std::size_t i, double v) {
    const double delta = v - values_[i];
    values_[i] = v;
    for (std::size_t k = i + 1; k < tree_.size(); k += k & (~k + 1)) tree_[k] += delta;
  }

  double total() const {
    double s = 0.0;
    for (std::size_t k = values_.size(); k > 0; k -= k & (~k + 1)) s += tree_[k];
    return s;
  }

  // Index i with prefix(i) <= x < prefix(i + 1), skipping zero entries that
  // rounding could land on.
  std::size_t find(double x) const {
    std::size_t pos = 0;
    for (std::size_t step = top_; step > 0; step >>= 1) {
      const std::size_t next = pos + step;
      if (next < tree_.size() && tree_[next] <= x) {
        pos = next;
        x -= tree_[next];
      }
    }
    if (pos >= values_.size()) pos = values_.size() - 1;
    if (values_[pos] > 0.0) return pos;
    for (std::size_t k = pos; k-- > 0;)
      if (values_[k] > 0.0) return k;
    for (std::size_t k = pos + 1; k < values_.size(); ++k)
      if (values_[k] > 0.0) return k;
    throw NumericError("weighted draw from an all-zero kernel");
  }

  // Recomputes partial sums from the stored values to shed rounding drift.
  void rebuild() {
    std::fill(tree_.begin(), tree_.end(), 0.0);
    for (std::size_t i = 0; i < values_.size(); ++i) {
      tree_[i + 1] += values_[i];
      const std::size_t parent = (i + 1) + ((i + 1) & (~(i + 1) + 1));
      if (parent < tree_.size()) tree_[parent] += tree_[i + 1];
    }
  }

 private:
  std::vector<double> tree_;
  std::vector<double> values_;
  std::size_t top_ = 1;
};

double kernel(double w, double lambda) {
  if (w <= 0.0) return 0.0;
  return lambda == 1.0 ? w : std::pow(w, lambda);
}

void check_alpha_lambda(double alpha, double lambda) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw UsageError("alpha must lie in (0, 1]");
  if (!(lambda > 0.0 && lambda <= 1.0)) throw UsageError("lambda must lie in (0, 1]");
}

TailFit line_fit(const std::vector<double>& x, const std::vector<double>& y) {
  TailFit fit;
  fit.points = x.size();
  if (x.size() < 2) throw NumericError("tail fit needs at least two points above the cutoff");
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0) throw NumericError("tail fit: all points share one abscissa");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

}  // namespace

void SimConfig::validate() const {
  check_alpha_lambda(alpha, lambda);
  if (m == 0) throw UsageError("m must be a positive integer");
  if (horizon == 0) throw UsageError("horizon must be positive");
  if (events_per_period == 0) throw UsageError("events per period must be positive");
  if (edge_universe.empty()) throw UsageError("edge universe is empty");
  if (m > edge_universe.size()) throw UsageError("m exceeds the size of the edge universe");
  (void)pair_mask(nodes.size(), edge_universe);
  if (!warm_start.empty()) (void)TemporalEdgeLog(nodes, warm_start, weight_mode);
}

SimConfig sweden_profile() {
  SimConfig c;
  c.alpha = 0.855;
  c.lambda = 0.649;
  c.m = 2;
  c.nodes = NodeUniverse::numbered(98, 65);
  c.edge_universe = c.nodes.eligible_pairs();
  c.horizon = 20000;
  c.weight_mode = WeightMode::fractional;
  c.events_per_period = 1;
  return c;
}

ScoreMatrix pwa_edge_probabilities(const WeightedDigraph& g, double alpha, double lambda,
                                   const std::vector<EdgePair>& universe) {
  check_alpha_lambda(alpha, lambda);
  if (universe.empty()) throw UsageError("edge universe is empty");
  const auto n = static_cast<Eigen::Index>(g.size());
  ScoreMatrix out;
  out.predictor = "pwa_process";
  out.eligible = pair_mask(g.size(), universe);
  out.scores = Eigen::MatrixXd::Zero(n, n);

  double kernel_sum = 0.0;
  std::size_t zero_edges = 0;
  for (const EdgePair& p : universe) {
    const double w = g.weight(p.source, p.target);
    if (w > 0.0)
      kernel_sum += kernel(w, lambda);
    else
      ++zero_edges;
  }
  const std::size_t positive_edges = universe.size() - zero_edges;
  double share_positive = alpha;
  if (positive_edges == 0) share_positive = 0.0;
  if (zero_edges == 0) share_positive = 1.0;
  const double share_zero = 1.0 - share_positive;

  for (const EdgePair& p : universe) {
    const double w = g.weight(p.source, p.target);
    out.scores(p.source, p.target) = w > 0.0 ? share_positive * kernel(w, lambda) / kernel_sum
                                             : share_zero / static_cast<double>(zero_edges);
  }
  return out;
}

TemporalEdgeLog simulate(const SimConfig& config) {
  config.validate();
  const std::vector<EdgePair>& universe = config.edge_universe;
  const std::size_t edges = universe.size();
  const double increment =
      config.weight_mode == WeightMode::unit ? 1.0 : 1.0 / static_cast<double>(config.m);

  std::vector<double> weight(edges, 0.0);
  Fenwick kernels(edges);
  std::vector<std::size_t> zeros(edges);
  std::iota(zeros.begin(), zeros.end(), std::size_t{0});
  std::vector<std::size_t> zero_slot(zeros);
  std::size_t positive = 0;

  Rng rng(config.seed);
  std::vector<Event> events = config.warm_start;
  events.reserve(config.warm_start.size() + config.horizon);
  Time offset = 0;
  if (!config.warm_start.empty()) {
    std::map<EdgePair, std::size_t> slot;
    for (std::size_t e = 0; e < edges; ++e) slot[universe[e]] = e;
    for (const Event& ev : config.warm_start) {
      const double w = config.weight_mode == WeightMode::unit ? 1.0 : 1.0 / static_cast<double>(ev.flows.size());
      for (const Flow& f : ev.flows) {
        auto it = slot.find({f.source, f.target});
        if (it == slot.end()) throw UsageError("warm start flow outside the edge universe");
        weight[it->second] += w;
      }
    }
    for (std::size_t e = 0; e < edges; ++e)
      if (weight[e] > 0.0) {
        ++positive;
        kernels.set(e, kernel(weight[e], config.lambda));
      }
    std::vector<std::size_t> left;
    for (std::size_t e : zeros)
      if (weight[e] == 0.0) left.push_back(e);
    zeros = std::move(left);
    for (std::size_t k = 0; k < zeros.size(); ++k) zero_slot[zeros[k]] = k;
    offset = config.warm_start.back().time;
  }
  std::vector<std::size_t> chosen;
  chosen.reserve(config.m);

  for (std::size_t step = 0; step < config.horizon; ++step) {
    if (step % 4096 == 4095) kernels.rebuild();
    const std::size_t zero_count = zeros.size();
    double share_positive = config.alpha;
    if (positive == 0) share_positive = 0.0;
    if (zero_count == 0) share_positive = 1.0;
    const double share_zero = 1.0 - share_positive;
    const std::size_t reachable =
        (share_positive > 0.0 ? positive : 0) + (share_zero > 0.0 ? zero_count : 0);
    if (config.m > reachable)
      throw NumericError("simulation step " + std::to_string(step) + ": m = " +
                         std::to_string(config.m) + " exceeds the " + std::to_string(reachable) +
                         " pairs with positive probability");

    const double kernel_total = kernels.total();
    double kernel_left = kernel_total;
    std::size_t zeros_left = zero_count;
    chosen.clear();
    for (std::size_t draw = 0; draw < config.m; ++draw) {
      const double mass_positive =
          share_positive > 0.0 && kernel_left > 0.0 ? share_positive * kernel_left / kernel_total
                                                    : 0.0;
      const double mass_zero =
          share_zero > 0.0 && zeros_left > 0
              ? share_zero * static_cast<double>(zeros_left) / static_cast<double>(zero_count)
              : 0.0;
      const double r = rng.uniform() * (mass_positive + mass_zero);
      std::size_t edge = 0;
      if (r < mass_positive) {
        edge = kernels.find(r / share_positive * kernel_total);
        kernel_left = std::max(0.0, kernel_left - kernels.value(edge));
        kernels.set(edge, 0.0);
      } else {
        const std::size_t k = rng.below(zeros_left);
        edge = zeros[k];
        const std::size_t last = zeros[zeros_left - 1];
        std::swap(zeros[k], zeros[zeros_left - 1]);
        zero_slot[last] = k;
        zero_slot[edge] = zeros_left - 1;
        --zeros_left;
      }
      chosen.push_back(edge);
    }
    zeros.resize(zeros_left);

    Event ev;
    ev.time = offset + 1 + static_cast<Time>(step / config.events_per_period);
    for (std::size_t edge : chosen) {
      if (weight[edge] == 0.0) ++positive;
      weight[edge] += increment;
      kernels.set(edge, kernel(weight[edge], config.lambda));
      ev.flows.push_back({universe[edge].source, universe[edge].target});
    }
    std::sort(ev.flows.begin(), ev.flows.end(), [](const Flow& a, const Flow& b) {
      return std::tie(a.source, a.target) < std::tie(b.source, b.target);
    });
    events.push_back(std::move(ev));
  }
  return TemporalEdgeLog(config.nodes, std::move(events), config.weight_mode);
}

std::vector<TemporalEdgeLog> simulate_replicates(const SimConfig& config, std::size_t count) {
  config.validate();
  std::vector<TemporalEdgeLog> out(count);
  const auto runs = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t r = 0; r < runs; ++r) {
    SimConfig c = config;
    c.seed = config.seed + static_cast<std::uint64_t>(r);
    out[static_cast<std::size_t>(r)] = simulate(c);
  }
  return out;
}

std::size_t WeightHistogram::positive_edges() const {
  std::size_t zero = 0;
  if (auto it = bins.find(0.0); it != bins.end()) zero = it->second;
  return total_edges - zero;
}

WeightHistogram weight_histogram(const WeightedDigraph& g, const std::vector<EdgePair>& universe) {
  WeightHistogram h;
  for (const EdgePair& p : universe) ++h.bins[g.weight(p.source, p.target)];
  h.total_edges = universe.size();
  return h;
}

double estimate_mu(const TemporalEdgeLog& log, double lambda) {
  if (log.empty()) throw DataError("cannot estimate mu from an empty log");
  const WeightedDigraph g = snapshot(log, log.last_time());
  double sum = 0.0;
  std::size_t positive = 0;
  for (Eigen::Index i = 0; i < g.weights().size(); ++i) {
    const double w = g.weights().data()[i];
    if (w <= 0.0) continue;
    sum += lambda == 0.0 ? 1.0 : std::pow(w, lambda);
    ++positive;
  }
  if (positive == 0) throw NumericError("cannot estimate mu: no positive-weight edges");
  return sum / static_cast<double>(positive);
}

double stretched_kappa(double alpha, double m, double mu) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw UsageError("alpha must lie in (0, 1]");
  return (1.0 - alpha) * m * mu / alpha;
}

double PowerLawTail::operator()(double w) const { return scale * std::pow(w, exponent()); }

double StretchedExponentialTail::operator()(double w) const {
  return scale * std::exp(-kappa * std::pow(w, 1.0 - lambda) / (1.0 - lambda));
}

PowerLawTail theoretical_ccdf_linear(double alpha, double scale) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw UsageError("alpha must lie in (0, 1]");
  return {alpha, scale};
}

StretchedExponentialTail theoretical_ccdf_sublinear(double lambda, double kappa, double scale) {
  if (!(lambda >= 0.5 && lambda < 1.0))
    throw UsageError("stretched-exponential tail requires lambda in [0.5, 1)");
  if (!(kappa > 0.0)) throw UsageError("kappa must be positive");
  return {lambda, kappa, scale};
}

namespace {

std::vector<double> normalize_logs(std::vector<double> logs) {
  const double top = *std::max_element(logs.begin(), logs.end());
  double sum = 0.0;
  for (double& v : logs) {
    v = std::exp(v - top);
    sum += v;
  }
  for (double& v : logs) v /= sum;
  return logs;
}

}  // namespace

std::vector<double> master_equation_pmf(double alpha, double lambda, double m, double mu,
                                        std::size_t w_max) {
  if (w_max == 0) throw UsageError("w_max must be positive");
  const double c = stretched_kappa(alpha, m, mu);
  std::vector<double> logs(w_max);
  double product = 0.0;
  for (std::size_t w = 1; w <= w_max; ++w) {
    const double jl = std::pow(static_cast<double>(w), lambda);
    product += std::log(jl) - std::log(c + jl);
    logs[w - 1] = product - lambda * std::log(static_cast<double>(w));
  }
  return normalize_logs(std::move(logs));
}

std::vector<double> linear_gamma_pmf(double alpha, double m, double mu, std::size_t w_max) {
  if (w_max == 0) throw UsageError("w_max must be positive");
  const double c = stretched_kappa(alpha, m, mu);
  std::vector<double> logs(w_max);
  for (std::size_t w = 1; w <= w_max; ++w) {
    const auto x = static_cast<double>(w);
    logs[w - 1] = -std::log(x) + std::lgamma(x + 1.0) - std::lgamma(c + x + 1.0);
  }
  return normalize_logs(std::move(logs));
}

TailFit fit_power_law_tail(const CcdfSeries& series, double w_min) {
  std::vector<double> x, y;
  for (const CcdfPoint& p : series) {
    if (p.value < w_min || p.value <= 0.0) continue;
    x.push_back(std::log(p.value));
    y.push_back(std::log(p.prob));
  }
  return line_fit(x, y);
}

TailFit fit_stretched_tail(const CcdfSeries& series, double lambda, double w_min) {
  std::vector<double> x, y;
  for (const CcdfPoint& p : series) {
    if (p.value < w_min) continue;
    x.push_back(std::pow(p.value, 1.0 - lambda));
    y.push_back(std::log(p.prob));
  }
  return line_fit(x, y);
}

CcdfSeries weight_ccdf(const WeightedDigraph& g, const std::vector<EdgePair>& universe) {
  std::vector<double> values;
  for (const EdgePair& p : universe) {
    const double w = g.weight(p.source, p.target);
    if (w > 0.0) values.push_back(w);
  }
  return ccdf(std::move(values));
}

}  // namespace innoflow::pwa
