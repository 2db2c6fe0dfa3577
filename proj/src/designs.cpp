#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "innoflow/error.hpp"
#include "innoflow/stats.hpp"

namespace innoflow::stats {

EvolutionSpec parse_evolution_spec(const std::string& text) {
  if (text == "linear") return EvolutionSpec::linear;
  if (text == "logit") return EvolutionSpec::logit;
  if (text == "loglog") return EvolutionSpec::loglog;
  throw UsageError("unknown evolution spec '" + text + "' (linear, logit, loglog)");
}

Effects parse_effects(const std::string& text) {
  if (text == "none") return Effects::none;
  if (text == "fixed") return Effects::fixed;
  throw UsageError("unknown effects '" + text + "' (none, fixed)");
}

namespace {

// Running pair weights. Fractional weights are kept as integers over the
// least common multiple of fan-outs so equal weights compare equal; past
// 2^40 we fall back to plain doubles.
class WeightTracker {
 public:
  explicit WeightTracker(const TemporalEdgeLog& log) : n_(log.nodes().size()) {
    if (log.mode() == WeightMode::fractional) {
      for (const Event& ev : log.events()) {
        const auto k = static_cast<std::int64_t>(ev.flows.size());
        const std::int64_t next = std::lcm(denominator_, k);
        if (next > (std::int64_t{1} << 40)) {
          exact_ = false;
          break;
        }
        denominator_ = next;
      }
    }
    units_.assign(n_ * n_, 0);
    values_.assign(n_ * n_, 0.0);
  }

  std::size_t index(const Flow& f) const { return f.source * n_ + f.target; }
  std::size_t index(const EdgePair& p) const { return p.source * n_ + p.target; }

  void add(std::size_t idx, std::size_t fan_out, const TemporalEdgeLog& log) {
    if (log.mode() == WeightMode::unit) {
      units_[idx] += 1;
      values_[idx] = static_cast<double>(units_[idx]);
    } else if (exact_) {
      units_[idx] += denominator_ / static_cast<std::int64_t>(fan_out);
      values_[idx] = static_cast<double>(units_[idx]) / static_cast<double>(denominator_);
    } else {
      values_[idx] += 1.0 / static_cast<double>(fan_out);
    }
  }

  double value(std::size_t idx) const { return values_[idx]; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::size_t n_;
  std::int64_t denominator_ = 1;
  bool exact_ = true;
  std::vector<std::int64_t> units_;
  std::vector<double> values_;
};

struct Window {
  TimeInterval span;
  std::vector<double> prior;  // weights before the window, by pair index
  std::map<std::size_t, double> flow;  // flow inside the window, by pair index
};

Time resolve_window(const TemporalEdgeLog& log, Time requested) {
  if (requested < 0) throw UsageError("kernel window must be positive (or 0 for automatic)");
  if (requested > 0) return requested;
  // Automatic: about 80 windows over the log, never below one time unit.
  const Time span = log.last_time() - log.first_time() + 1;
  return std::max<Time>(1, span / 80);
}

// Windows [first + kL, first + (k+1)L - 1] for k >= 1; the first window only
// builds up the prior weights.
std::vector<Window> kernel_windows(const TemporalEdgeLog& log, Time length) {
  std::vector<Window> out;
  WeightTracker w(log);
  const Time first = log.first_time();
  const Time last = log.last_time();
  std::size_t e = 0;
  const auto& events = log.events();
  for (Time start = first; start <= last; start += length) {
    Window win;
    win.span = {start, std::min(last, start + length - 1)};
    win.prior = w.values();
    while (e < events.size() && events[e].time <= win.span.last) {
      const Event& ev = events[e++];
      const double fw = log.flow_weight(ev);
      for (const Flow& f : ev.flows) {
        win.flow[w.index(f)] += fw;
        w.add(w.index(f), ev.flows.size(), log);
      }
    }
    if (start != first) out.push_back(std::move(win));
  }
  return out;
}

struct Step1Rows {
  std::vector<double> x, y, weight;
  std::vector<std::int64_t> window;
};

void add_window_rows(const Window& win, const std::vector<std::size_t>& pairs, KernelStep step,
                     std::int64_t label, Step1Rows& rows) {
  if (step == KernelStep::pairwise) {
    for (std::size_t idx : pairs) {
      const double w = win.prior[idx];
      if (w <= 0.0) continue;
      auto it = win.flow.find(idx);
      if (it == win.flow.end() || it->second <= 0.0) continue;
      rows.x.push_back(std::log(w));
      rows.y.push_back(std::log(it->second));
      rows.weight.push_back(1.0);
      rows.window.push_back(label);
    }
    return;
  }
  std::map<double, std::pair<double, std::size_t>> classes;
  for (std::size_t idx : pairs) {
    const double w = win.prior[idx];
    if (w <= 0.0) continue;
    auto& c = classes[w];
    auto it = win.flow.find(idx);
    if (it != win.flow.end()) c.first += it->second;
    ++c.second;
  }
  for (const auto& [w, c] : classes) {
    if (c.first <= 0.0) continue;
    rows.x.push_back(std::log(w));
    rows.y.push_back(std::log(c.first / static_cast<double>(c.second)));
    rows.weight.push_back(static_cast<double>(c.second));
    rows.window.push_back(label);
  }
}

// Weighted least squares of y on x with one intercept per window.
RegressionResult kernel_regression(const Step1Rows& rows, SeType se) {
  std::map<std::int64_t, std::array<double, 3>> means;
  for (std::size_t i = 0; i < rows.x.size(); ++i) {
    auto& m = means[rows.window[i]];
    m[0] += rows.weight[i];
    m[1] += rows.weight[i] * rows.x[i];
    m[2] += rows.weight[i] * rows.y[i];
  }
  DesignMatrix d;
  d.names = {"log_w"};
  const auto n = static_cast<Eigen::Index>(rows.x.size());
  d.x.resize(n, 1);
  d.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const auto& m = means[rows.window[k]];
    const double s = std::sqrt(rows.weight[k]);
    d.x(i, 0) = s * (rows.x[k] - m[1] / m[0]);
    d.y[i] = s * (rows.y[k] - m[2] / m[0]);
    d.groups.push_back(rows.window[k]);
  }
  RegressionResult r = detail::ols_absorbed(d, se, means.size());
  r.model = "kernel_step";
  return r;
}

std::vector<std::size_t> universe_indices(const TemporalEdgeLog& log) {
  std::vector<std::size_t> out;
  const std::size_t n = log.nodes().size();
  for (const EdgePair& p : log.nodes().eligible_pairs()) out.push_back(p.source * n + p.target);
  return out;
}

void require_two_stamps(const TemporalEdgeLog& log) {
  if (log.empty() || log.times().size() < 2)
    throw DataError("two-step fit needs events at two or more time stamps");
}

// Streaming bivariate regression y = a + b x from the moments
// M[p][q] = sum x^p y^q, p <= 4, q <= 2.
struct Moments {
  std::array<std::array<long double, 3>, 5> m{};
};

RegressionResult bivariate_from_moments(const Moments& mo, SeType se) {
  if (se == SeType::cluster)
    throw UsageError("clustered standard errors are not available for the two-step fit");
  auto M = [&](int p, int q) { return static_cast<double>(mo.m[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)]); };
  const double n = M(0, 0);
  if (n < 3) throw DataError("two-step fit: fewer than three step-2 observations");
  const double sx = M(1, 0), sy = M(0, 1), sxx = M(2, 0), sxy = M(1, 1), syy = M(0, 2);
  const double det = n * sxx - sx * sx;
  if (!(det > 0.0)) throw NumericError("two-step fit: kernel regressor has no variation");
  const double b = (n * sxy - sx * sy) / det;
  const double a = (sy - b * sx) / n;
  Eigen::Matrix2d bread;
  bread << sxx, -sx, -sx, n;
  bread /= det;

  // sum x^r e^2 with e = y - a - b x
  auto xe2 = [&](int r) {
    return M(r, 2) - 2.0 * a * M(r, 1) - 2.0 * b * M(r + 1, 1) + a * a * M(r, 0) +
           2.0 * a * b * M(r + 1, 0) + b * b * M(r + 2, 0);
  };
  const double ssr = std::max(0.0, xe2(0));
  RegressionResult out;
  out.model = "pwa_step";
  out.names = {"const", "pwa_kernel"};
  out.coefficients = Eigen::Vector2d(a, b);
  out.se_type = se;
  out.n_obs = static_cast<std::size_t>(n);
  if (se == SeType::classic) {
    out.covariance = bread * (ssr / (n - 2.0));
  } else {
    Eigen::Matrix2d meat;
    meat << xe2(0), xe2(1), xe2(1), xe2(2);
    out.covariance = bread * meat * bread * (n / (n - 2.0));
  }
  const double tss = syy - sy * sy / n;
  out.r_squared = tss > 0.0 ? 1.0 - ssr / tss : 0.0;
  return out;
}

Moments step2_moments(const TemporalEdgeLog& log, double lambda, Step2Sample sample, Time from) {
  Moments mo;
  const std::vector<std::size_t> universe = universe_indices(log);
  std::vector<char> in_universe(log.nodes().size() * log.nodes().size(), 0);
  for (std::size_t idx : universe) in_universe[idx] = 1;
  WeightTracker w(log);
  std::vector<double> kernel(in_universe.size(), 0.0);
  std::array<long double, 5> power{};  // power[k] = sum kernel^k over positive pairs
  std::size_t positive = 0;
  auto recompute = [&] {
    power.fill(0.0L);
    for (std::size_t idx : universe) {
      const long double k = kernel[idx];
      if (k <= 0.0L) continue;
      long double t = 1.0L;
      for (std::size_t p = 1; p < power.size(); ++p) {
        t *= k;
        power[p] += t;
      }
    }
  };

  const auto& events = log.events();
  std::size_t e = 0;
  std::size_t stamps = 0;
  while (e < events.size()) {
    const Time t = events[e].time;
    std::map<std::size_t, double> flow;
    std::vector<std::pair<std::size_t, std::size_t>> updates;  // pair index, fan-out
    double total = 0.0;
    for (; e < events.size() && events[e].time == t; ++e) {
      const double fw = log.flow_weight(events[e]);
      for (const Flow& f : events[e].flows) {
        const std::size_t idx = w.index(f);
        flow[idx] += fw;
        total += fw;
        updates.emplace_back(idx, events[e].flows.size());
      }
    }

    if (stamps > 0 && t >= from && positive > 0 && total > 0.0) {
      const long double s = power[1];
      long double xp = 1.0L;
      const long double count = sample == Step2Sample::universe
                                    ? static_cast<long double>(universe.size())
                                    : static_cast<long double>(positive);
      mo.m[0][0] += count;
      for (std::size_t p = 1; p <= 4; ++p) {
        xp *= s;
        mo.m[p][0] += power[p] / xp;
      }
      for (const auto& [idx, dw] : flow) {
        if (!in_universe[idx]) continue;
        const long double k = kernel[idx];
        if (k <= 0.0L && sample == Step2Sample::positive) continue;
        const long double x = k / s;
        const long double y = dw / total;
        long double xq = 1.0L;
        for (std::size_t p = 0; p <= 4; ++p) {
          mo.m[p][1] += xq * y;
          mo.m[p][2] += xq * y * y;
          xq *= x;
        }
      }
    }

    for (const auto& [idx, fan_out] : updates) {
      w.add(idx, fan_out, log);
      if (!in_universe[idx]) continue;
      const long double before = kernel[idx];
      const double after = std::pow(w.value(idx), lambda);
      if (before <= 0.0L) ++positive;
      long double tb = 1.0L, ta = 1.0L;
      for (std::size_t p = 1; p < power.size(); ++p) {
        tb *= before;
        ta *= after;
        power[p] += ta - tb;
      }
      kernel[idx] = after;
    }
    if (++stamps % 4096 == 0) recompute();
  }
  return mo;
}

}  // namespace

TwoStepFit two_step_pwa_fit(const TemporalEdgeLog& log, const TwoStepOptions& options) {
  require_two_stamps(log);
  const Time length = resolve_window(log, options.kernel_window);
  const std::vector<Window> windows = kernel_windows(log, length);
  const std::vector<std::size_t> pairs = universe_indices(log);
  Step1Rows rows;
  for (const Window& win : windows)
    if (win.span.first >= options.fit_from)
      add_window_rows(win, pairs, options.step1, win.span.first, rows);
  if (rows.x.empty())
    throw DataError("two-step fit: no pairs with positive prior weight and positive flow");

  TwoStepFit fit;
  if (options.step1 == KernelStep::pairwise) {
    DesignMatrix d;
    d.names = {"log_w"};
    d.x = Eigen::Map<const Eigen::VectorXd>(rows.x.data(), static_cast<Eigen::Index>(rows.x.size()));
    d.y = Eigen::Map<const Eigen::VectorXd>(rows.y.data(), static_cast<Eigen::Index>(rows.y.size()));
    d.groups = rows.window;
    fit.step1 = ols(d.with_intercept(), options.se);
    fit.lambda_hat = fit.step1.coefficient("log_w");
  } else {
    fit.step1 = kernel_regression(rows, options.se);
    fit.lambda_hat = fit.step1.coefficients[0];
  }
  fit.windows = std::set<std::int64_t>(rows.window.begin(), rows.window.end()).size();
  if (!std::isfinite(fit.lambda_hat)) throw NumericError("two-step fit: kernel exponent not finite");

  fit.step2 = bivariate_from_moments(step2_moments(log, fit.lambda_hat, options.step2, options.fit_from), options.se);
  fit.alpha_hat = fit.step2.coefficient("pwa_kernel");
  return fit;
}

std::vector<std::pair<Time, double>> per_window_lambda(const TemporalEdgeLog& log,
                                                       const TwoStepOptions& options) {
  require_two_stamps(log);
  const Time length = resolve_window(log, options.kernel_window);
  const std::vector<std::size_t> pairs = universe_indices(log);
  std::vector<std::pair<Time, double>> out;
  for (const Window& win : kernel_windows(log, length)) {
    if (win.span.first < options.fit_from) continue;
    Step1Rows rows;
    add_window_rows(win, pairs, options.step1, win.span.first, rows);
    if (std::set<double>(rows.x.begin(), rows.x.end()).size() < 2 || rows.x.size() < 3) continue;
    try {
      const RegressionResult r = kernel_regression(rows, SeType::classic);
      out.emplace_back(win.span.first, r.coefficients[0]);
    } catch (const NumericError&) {
      // window without usable variation
    }
  }
  return out;
}

// ---------------------------------------------------------------- evolution

namespace {

Eigen::MatrixXd conform(const econ::ProximityMatrix& p, const NodeUniverse& nodes) {
  std::map<std::string, Eigen::Index> pos;
  for (std::size_t k = 0; k < p.ids.size(); ++k) pos[p.ids[k]] = static_cast<Eigen::Index>(k);
  if (p.values.rows() != static_cast<Eigen::Index>(p.ids.size()) ||
      p.values.cols() != p.values.rows())
    throw DataError("proximity matrix '" + econ::to_string(p.kind) + "' is not square over its ids");
  const auto n = static_cast<Eigen::Index>(nodes.size());
  Eigen::MatrixXd out(n, n);
  std::vector<Eigen::Index> map(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    auto it = pos.find(nodes.id(static_cast<NodeIndex>(i)));
    if (it == pos.end())
      throw DataError("proximity matrix '" + econ::to_string(p.kind) + "' has no entry for node '" +
                      nodes.id(static_cast<NodeIndex>(i)) + "'");
    map[static_cast<std::size_t>(i)] = it->second;
  }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      out(i, j) = p.values(map[static_cast<std::size_t>(i)], map[static_cast<std::size_t>(j)]);
  if (!out.allFinite()) throw DataError("proximity matrix '" + econ::to_string(p.kind) + "' has non-finite entries");
  return out;
}

void append_dummies(DesignMatrix& d, const std::vector<std::int64_t>& labels, const std::string& prefix) {
  std::set<std::int64_t> levels(labels.begin(), labels.end());
  if (levels.size() < 2) return;
  std::vector<std::int64_t> kept(std::next(levels.begin()), levels.end());
  const Eigen::Index base = d.x.cols();
  d.x.conservativeResize(Eigen::NoChange, base + static_cast<Eigen::Index>(kept.size()));
  d.x.rightCols(static_cast<Eigen::Index>(kept.size())).setZero();
  for (std::size_t k = 0; k < kept.size(); ++k) d.names.push_back(prefix + std::to_string(kept[k]));
  for (std::size_t r = 0; r < labels.size(); ++r) {
    auto it = std::lower_bound(kept.begin(), kept.end(), labels[r]);
    if (it != kept.end() && *it == labels[r])
      d.x(static_cast<Eigen::Index>(r), base + (it - kept.begin())) = 1.0;
  }
}

// Re-inserts dropped all-zero columns with coefficient 0 and zero variance.
RegressionResult restore_columns(RegressionResult r, const std::vector<std::string>& all,
                                 const std::vector<std::string>& dropped) {
  if (dropped.empty()) return r;
  std::vector<std::string> names;
  std::vector<Eigen::Index> source;
  // Keep the regressor order of the full design: dropped names slot in where
  // they were, fitted names (incl. const and dummies) keep their order.
  std::size_t fitted = 0;
  for (const std::string& name : all) {
    if (std::find(dropped.begin(), dropped.end(), name) != dropped.end()) {
      names.push_back(name);
      source.push_back(-1);
    } else {
      names.push_back(r.names[fitted]);
      source.push_back(static_cast<Eigen::Index>(fitted));
      ++fitted;
    }
  }
  for (; fitted < r.names.size(); ++fitted) {
    names.push_back(r.names[fitted]);
    source.push_back(static_cast<Eigen::Index>(fitted));
  }
  const auto k = static_cast<Eigen::Index>(names.size());
  Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    if (source[static_cast<std::size_t>(i)] < 0) continue;
    b[i] = r.coefficients[source[static_cast<std::size_t>(i)]];
    for (Eigen::Index j = 0; j < k; ++j)
      if (source[static_cast<std::size_t>(j)] >= 0)
        v(i, j) = r.covariance(source[static_cast<std::size_t>(i)], source[static_cast<std::size_t>(j)]);
  }
  r.names = names;
  r.coefficients = b;
  r.covariance = v;
  return r;
}

}  // namespace

RegressionResult evolution_regression(const TemporalEdgeLog& log,
                                      const std::vector<econ::ProximityMatrix>& proximities,
                                      const EvolutionOptions& options) {
  const NodeUniverse& nodes = log.nodes();
  std::vector<Eigen::MatrixXd> z;
  std::vector<std::string> z_names;
  std::map<std::string, int> seen;
  for (const auto& p : proximities) {
    z.push_back(conform(p, nodes));
    std::string name = econ::to_string(p.kind);
    if (++seen[name] > 1) name += "_" + std::to_string(seen[name]);
    z_names.push_back(name);
  }

  const std::vector<TimeInterval> windows = predict::periods(log, options.period_length);
  if (windows.size() < 2) throw DataError("evolution regression needs at least two periods of data");
  const std::vector<EdgePair> universe = nodes.eligible_pairs();
  std::vector<std::string> warnings;

  std::vector<double> y, pa;
  std::vector<std::vector<double>> zc(z.size());
  std::vector<std::int64_t> sender, receiver, period, pair_id;
  for (std::size_t t = 1; t < windows.size(); ++t) {
    const WeightedDigraph history = snapshot(log, windows[t - 1].last);
    const WeightedDigraph flow = accumulate_flows(log, windows[t]);
    double sum_w = 0.0, sum_dw = 0.0;
    for (const EdgePair& p : universe) {
      sum_w += history.weight(p.source, p.target);
      sum_dw += flow.weight(p.source, p.target);
    }
    if (sum_w <= 0.0 || sum_dw <= 0.0) {
      warnings.push_back("period " + std::to_string(windows[t].first) +
                         " skipped: no prior weight or no flow");
      continue;
    }
    for (const EdgePair& p : universe) {
      const double w = history.weight(p.source, p.target) / sum_w;
      const double dw = flow.weight(p.source, p.target) / sum_dw;
      double yv = dw, xv = w;
      switch (options.spec) {
        case EvolutionSpec::linear: break;
        case EvolutionSpec::logit: yv = dw > 0.0 ? 1.0 : 0.0; break;
        case EvolutionSpec::loglog:
          if (dw <= 0.0 || w <= 0.0) continue;
          yv = std::log(dw);
          xv = std::log(w);
          break;
      }
      y.push_back(yv);
      pa.push_back(xv);
      for (std::size_t l = 0; l < z.size(); ++l)
        zc[l].push_back(z[l](static_cast<Eigen::Index>(p.source), static_cast<Eigen::Index>(p.target)));
      sender.push_back(static_cast<std::int64_t>(p.source));
      receiver.push_back(static_cast<std::int64_t>(p.target));
      period.push_back(static_cast<std::int64_t>(t));
      pair_id.push_back(static_cast<std::int64_t>(p.source * nodes.size() + p.target));
    }
  }
  if (y.empty()) throw DataError("evolution regression: no observations");

  std::vector<std::string> full_names = {"pref_att"};
  full_names.insert(full_names.end(), z_names.begin(), z_names.end());
  std::vector<std::string> dropped;
  std::vector<std::size_t> kept_z;
  for (std::size_t l = 0; l < z.size(); ++l) {
    const bool all_zero = std::all_of(zc[l].begin(), zc[l].end(), [](double v) { return v == 0.0; });
    if (all_zero) {
      dropped.push_back(z_names[l]);
      warnings.push_back("regressor " + z_names[l] + " is identically zero; dropped (rank) and reported as 0");
    } else {
      kept_z.push_back(l);
    }
  }

  DesignMatrix d;
  const auto n = static_cast<Eigen::Index>(y.size());
  d.names = {"pref_att"};
  for (std::size_t l : kept_z) d.names.push_back(z_names[l]);
  d.x.resize(n, static_cast<Eigen::Index>(d.names.size()));
  d.y = Eigen::Map<const Eigen::VectorXd>(y.data(), n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d.x(i, 0) = pa[static_cast<std::size_t>(i)];
    for (std::size_t c = 0; c < kept_z.size(); ++c)
      d.x(i, static_cast<Eigen::Index>(c + 1)) = zc[kept_z[c]][static_cast<std::size_t>(i)];
  }
  d.groups = pair_id;

  RegressionResult r;
  if (options.spec == EvolutionSpec::logit) {
    DesignMatrix full = d.with_intercept();
    if (options.effects == Effects::fixed) {
      append_dummies(full, sender, "sender=");
      append_dummies(full, receiver, "receiver=");
    }
    if (options.time_dummies) append_dummies(full, period, "t=");
    full_names.insert(full_names.begin(), "const");
    r = logit(full, options.se);
  } else if (options.effects == Effects::fixed) {
    std::vector<std::vector<std::int64_t>> factors = {receiver};
    std::vector<std::string> names = {"receiver"};
    if (options.time_dummies) {
      factors.push_back(period);
      names.push_back("t");
    }
    r = fixed_effects(d, sender, factors, options.se, names);
  } else {
    DesignMatrix full = d.with_intercept();
    if (options.time_dummies) append_dummies(full, period, "t=");
    full_names.insert(full_names.begin(), "const");
    r = ols(full, options.se);
  }
  r = restore_columns(std::move(r), full_names, dropped);
  r.model = "evolution_" + std::string(options.spec == EvolutionSpec::linear  ? "linear"
                                       : options.spec == EvolutionSpec::logit ? "logit"
                                                                              : "loglog");
  r.warnings.insert(r.warnings.begin(), warnings.begin(), warnings.end());
  return r;
}

RegressionResult stimulus_regression(const predict::StimulusPanel& panel,
                                     const StimulusOptions& options) {
  if (panel.rows.empty()) throw DataError("stimulus regression on an empty panel");
  const auto n = static_cast<Eigen::Index>(panel.rows.size());
  DesignMatrix d;
  d.names = {"log_xf", "log_xb"};
  d.x.resize(n, 2);
  d.y.resize(n);
  std::vector<std::int64_t> units, period;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = panel.rows[static_cast<std::size_t>(i)];
    if (row.x < 0.0 || row.x_forward < 0.0 || row.x_backward < 0.0)
      throw DataError("stimulus panel has negative counts");
    d.y[i] = std::log1p(row.x);
    d.x(i, 0) = std::log1p(row.x_forward);
    d.x(i, 1) = std::log1p(row.x_backward);
    units.push_back(static_cast<std::int64_t>(row.industry));
    period.push_back(static_cast<std::int64_t>(row.period));
  }
  d.groups = units;
  RegressionResult r;
  if (options.effects == Effects::fixed) {
    std::vector<std::vector<std::int64_t>> factors;
    if (options.time_dummies) factors.push_back(period);
    r = fixed_effects(d, units, factors, options.se, std::vector<std::string>(factors.size(), "t"));
  } else {
    DesignMatrix full = d.with_intercept();
    if (options.time_dummies) append_dummies(full, period, "t=");
    r = ols(full, options.se);
  }
  r.model = "stimulus";
  return r;
}

}  // namespace innoflow::stats
