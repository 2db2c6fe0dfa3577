#include "innoflow/predict.hpp"

#include <algorithm>
#include <set>
#include <cmath>

#include "innoflow/error.hpp"

namespace innoflow::predict {

std::vector<EdgePair> top_n(const ScoreMatrix& scores, std::size_t n) {
  std::vector<EdgePair> pairs = scores.eligible_pairs();
  if (n > pairs.size())
    throw UsageError("top_n: N = " + std::to_string(n) + " exceeds the " +
                     std::to_string(pairs.size()) + " eligible pairs");
  for (const EdgePair& p : pairs)
    if (!std::isfinite(scores.scores(p.source, p.target)))
      throw NumericError("top_n: non-finite score on an eligible pair");
  auto better = [&](const EdgePair& a, const EdgePair& b) {
    const double sa = scores.scores(a.source, a.target);
    const double sb = scores.scores(b.source, b.target);
    if (sa != sb) return sa > sb;
    return a < b;
  };
  std::partial_sort(pairs.begin(), pairs.begin() + static_cast<std::ptrdiff_t>(n), pairs.end(),
                    better);
  pairs.resize(n);
  return pairs;
}

ConfusionCounts confusion(const std::vector<EdgePair>& pred, const std::vector<EdgePair>& actual,
                          const std::vector<EdgePair>& universe) {
  const std::set<EdgePair> u(universe.begin(), universe.end());
  if (u.empty()) throw DataError("confusion counts over an empty universe");
  const std::set<EdgePair> p(pred.begin(), pred.end());
  const std::set<EdgePair> a(actual.begin(), actual.end());
  for (const EdgePair& e : p)
    if (!u.contains(e)) throw DataError("predicted pair outside the universe");
  for (const EdgePair& e : a)
    if (!u.contains(e)) throw DataError("actual pair outside the universe");
  ConfusionCounts c;
  for (const EdgePair& e : u) {
    const bool in_p = p.contains(e);
    const bool in_a = a.contains(e);
    if (in_p && in_a) ++c.tp;
    else if (in_p) ++c.fp;
    else if (in_a) ++c.fn;
    else ++c.tn;
  }
  return c;
}

double accuracy(const ConfusionCounts& c) {
  if (c.total() == 0) throw DataError("accuracy over an empty universe");
  return static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
}

double accuracy(const std::vector<EdgePair>& pred, const std::vector<EdgePair>& actual,
                const std::vector<EdgePair>& universe) {
  return accuracy(confusion(pred, actual, universe));
}

double precision(const std::vector<EdgePair>& pred, const std::vector<EdgePair>& actual) {
  const std::set<EdgePair> p(pred.begin(), pred.end());
  if (p.empty()) throw UsageError("precision of an empty prediction");
  const std::set<EdgePair> a(actual.begin(), actual.end());
  std::size_t hit = 0;
  for (const EdgePair& e : p)
    if (a.contains(e)) ++hit;
  return static_cast<double>(hit) / static_cast<double>(p.size());
}

std::vector<TimeInterval> periods(const TemporalEdgeLog& log, Time period_length) {
  if (period_length <= 0) throw UsageError("period length must be positive");
  std::vector<TimeInterval> out;
  if (log.empty()) return out;
  const Time first = log.first_time();
  const Time last = log.last_time();
  for (Time start = first; start <= last; start += period_length)
    out.push_back({start, std::min(last, start + period_length - 1)});
  return out;
}

namespace {

std::size_t event_count(const TemporalEdgeLog& log, const TimeInterval& window) {
  std::size_t count = 0;
  for (const Event& ev : log.events())
    if (window.contains(ev.time)) ++count;
  return count;
}

struct Cell {
  std::optional<RollingRow> row;
  std::string error;
};

}  // namespace

RollingReport rolling_eval(const TemporalEdgeLog& log, const RollingOptions& options) {
  RollingReport report;
  const std::vector<TimeInterval> all = periods(log, options.period_length);
  if (all.size() < 2) throw DataError("rolling evaluation needs at least two periods of data");

  std::vector<TimeInterval> eval;
  for (std::size_t k = 1; k < all.size(); ++k) {
    if (options.first_period_start && all[k].first < *options.first_period_start) continue;
    if (options.last_period_start && all[k].first > *options.last_period_start) continue;
    eval.push_back(all[k]);
  }

  const BoolMatrix mask = source_mask(log.nodes());
  std::vector<EdgePair> universe;
  for (Eigen::Index i = 0; i < mask.rows(); ++i)
    for (Eigen::Index j = 0; j < mask.cols(); ++j)
      if (mask(i, j)) universe.push_back({static_cast<NodeIndex>(i), static_cast<NodeIndex>(j)});

  struct PeriodData {
    TimeInterval window;
    std::size_t events = 0;
    WeightedDigraph history;
    std::vector<EdgePair> actual;
  };
  std::vector<PeriodData> data;
  for (const TimeInterval& window : eval) {
    PeriodData d;
    d.window = window;
    d.events = event_count(log, window);
    if (d.events == 0) {
      report.notes.push_back("period " + std::to_string(window.first) + " skipped: no events");
      continue;
    }
    d.history = snapshot(log, window.first - 1);
    const WeightedDigraph flow = accumulate_flows(log, window);
    for (const EdgePair& p : universe)
      if (flow.weight(p.source, p.target) > 0.0) d.actual.push_back(p);
    data.push_back(std::move(d));
  }

  const std::size_t n_pred = options.predictors.size();
  std::vector<Cell> cells(data.size() * n_pred);
  const auto n_cells = static_cast<std::int64_t>(cells.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t c = 0; c < n_cells; ++c) {
    const std::size_t p = static_cast<std::size_t>(c) / n_pred;
    const std::size_t k = static_cast<std::size_t>(c) % n_pred;
    const PeriodData& d = data[p];
    Cell& cell = cells[static_cast<std::size_t>(c)];
    try {
      metrics::PredictorOptions popt = options.predictor_options;
      popt.random_seed = options.predictor_options.random_seed * 1000003ULL +
                         static_cast<std::uint64_t>(d.window.first);
      ScoreMatrix s = metrics::score_by_name(options.predictors[k], d.history, popt);
      s.eligible = mask;
      RollingRow row;
      row.period_start = d.window.first;
      row.period_end = d.window.last;
      row.predictor = options.predictors[k];
      row.universe = universe.size();
      row.n = std::min(d.events, universe.size());
      row.actual = d.actual.size();
      const std::vector<EdgePair> pred = top_n(s, row.n);
      row.counts = confusion(pred, d.actual, universe);
      row.accuracy = accuracy(row.counts);
      row.precision = precision(pred, d.actual);
      cell.row = row;
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
  }

  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (cells[c].row) {
      report.rows.push_back(*cells[c].row);
    } else {
      const PeriodData& d = data[c / n_pred];
      report.notes.push_back("period " + std::to_string(d.window.first) + " predictor " +
                             options.predictors[c % n_pred] + " failed: " + cells[c].error);
    }
  }
  return report;
}

Eigen::VectorXd stimulus_forward(const WeightedDigraph& g, const Eigen::VectorXd& x_prev) {
  if (static_cast<std::size_t>(x_prev.size()) != g.size())
    throw UsageError("stimulus: count vector does not match the graph");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(x_prev.size());
  for (Eigen::Index j = 0; j < x_prev.size(); ++j) {
    const double s = g.out_strength()[j];
    if (s <= 0.0) continue;
    for (Eigen::Index i = 0; i < x_prev.size(); ++i) out[i] += g.weight(j, i) / s * x_prev[j];
  }
  return out;
}

Eigen::VectorXd stimulus_backward(const WeightedDigraph& g, const Eigen::VectorXd& x_prev) {
  if (static_cast<std::size_t>(x_prev.size()) != g.size())
    throw UsageError("stimulus: count vector does not match the graph");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(x_prev.size());
  for (Eigen::Index j = 0; j < x_prev.size(); ++j) {
    const double s = g.in_strength()[j];
    if (s <= 0.0) continue;
    for (Eigen::Index i = 0; i < x_prev.size(); ++i) out[i] += g.weight(i, j) / s * x_prev[j];
  }
  return out;
}

StimulusPanel stimulus_panel(const TemporalEdgeLog& log, Time period_length) {
  const std::vector<TimeInterval> windows = periods(log, period_length);
  if (windows.size() < 2) throw DataError("stimulus panel needs at least two periods of data");
  StimulusPanel panel;
  panel.nodes = log.nodes();
  const std::vector<NodeIndex> industries = log.nodes().eligible_sources();
  for (std::size_t t = 1; t < windows.size(); ++t) {
    const WeightedDigraph g = snapshot(log, windows[t - 1].last);
    const Eigen::VectorXd x_prev = period_counts(log, windows[t - 1]);
    const Eigen::VectorXd x_now = period_counts(log, windows[t]);
    const Eigen::VectorXd fwd = stimulus_forward(g, x_prev);
    const Eigen::VectorXd bwd = stimulus_backward(g, x_prev);
    for (NodeIndex i : industries) {
      const auto k = static_cast<Eigen::Index>(i);
      panel.rows.push_back({i, t, windows[t].first, x_now[k], fwd[k], bwd[k]});
    }
  }
  return panel;
}

}  // namespace innoflow::predict
