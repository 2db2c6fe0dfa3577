#include "innoflow/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "innoflow/econ.hpp"
#include "innoflow/error.hpp"
#include "innoflow/io.hpp"
#include "innoflow/metrics.hpp"
#include "innoflow/netcore.hpp"
#include "innoflow/predict.hpp"
#include "innoflow/pwa.hpp"
#include "innoflow/stats.hpp"

namespace fs = std::filesystem;

namespace innoflow::cli {

std::string error_line(const std::string& kind, int code, const std::string& message) {
  std::string flat = message;
  std::replace(flat.begin(), flat.end(), '\n', ' ');
  return "innoflow: error kind=" + kind + " code=" + std::to_string(code) + ": " + flat;
}

namespace {

using io::format_double;

// ---------------------------------------------------------------- plumbing

struct Run {
  fs::path out;
  io::RunManifest manifest;
  std::ostream* console = nullptr;

  void write(const std::string& name, const std::function<void(std::ostream&)>& body) const {
    const fs::path path = out / name;
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError("cannot write '" + path.string() + "'");
    body(f);
    if (!f) throw DataError("write failed for '" + path.string() + "'");
  }
  void param(const std::string& key, const std::string& value) { manifest.set(key, value); }
  void param(const std::string& key, double value) { manifest.set(key, format_double(value)); }
};

void prepare_out(const fs::path& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) throw DataError("cannot create output directory '" + out.string() + "'");
}

// Every option of the subcommand chain that was given or has a default.
void record_options(const CLI::App* app, io::RunManifest& m) {
  for (const CLI::Option* opt : app->get_options()) {
    if (opt->get_name() == "--help" || opt->get_name() == "--out" || opt->get_name() == "-h,--help")
      continue;
    std::string value;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      for (std::size_t i = 0; i < res.size(); ++i) value += (i ? ";" : "") + res[i];
      if (res.empty() || (opt->get_type_size() == 0 && value.empty())) value = "true";
    } else {
      value = opt->get_default_str();
      if (value.empty()) continue;
    }
    std::string key = opt->get_name(false, true);
    while (!key.empty() && key.front() == '-') key.erase(key.begin());
    m.set(key, value);
  }
}

void digest(Run& run, const std::string& path) {
  if (path.empty()) return;
  run.manifest.digests.emplace_back(path, io::sha256_file(path));
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  for (auto& f : io::split_csv(text))
    if (!f.empty()) out.push_back(f);
  return out;
}

void write_regression(std::ostream& o, const std::string& label, const stats::RegressionResult& r) {
  // human-readable table
  o << "# " << label << " (" << r.model << ")\n";
  o << "# " << std::left << std::setw(24) << "term" << std::right << std::setw(16) << "coef"
    << std::setw(16) << "se" << '\n';
  for (std::size_t k = 0; k < r.names.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    o << "# " << std::left << std::setw(24) << r.names[k] << std::right << std::setw(16)
      << std::setprecision(6) << r.coefficients[i] << std::setw(16)
      << std::sqrt(std::max(0.0, r.covariance(i, i))) << '\n';
  }
  o << "# n = " << r.n_obs << ", r2 = " << std::setprecision(6) << r.r_squared << ", se = "
    << stats::to_string(r.se_type) << '\n';
  // key=value block
  o << "[" << label << "]\n";
  o << "model=" << r.model << '\n';
  o << "n=" << r.n_obs << '\n';
  o << "r2=" << format_double(r.r_squared) << '\n';
  o << "se_type=" << stats::to_string(r.se_type) << '\n';
  if (r.dropped_singletons) o << "dropped_singletons=" << r.dropped_singletons << '\n';
  if (r.model == "logit" || r.model.find("logit") != std::string::npos) {
    o << "log_likelihood=" << format_double(r.log_likelihood) << '\n';
    o << "iterations=" << r.iterations << '\n';
  }
  for (std::size_t k = 0; k < r.names.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    o << "coefficient." << r.names[k] << '=' << format_double(r.coefficients[i]) << '\n';
    o << "se." << r.names[k] << '=' << format_double(std::sqrt(std::max(0.0, r.covariance(i, i)))) << '\n';
  }
  for (const auto& w : r.warnings) o << "warning=" << w << '\n';
}

struct LogInput {
  std::string edge_log;
  std::string universe;
  std::string weight_mode = "fractional";

  void add(CLI::App* sub) {
    sub->add_option("--edge-log", edge_log, "edge-log CSV")->required();
    sub->add_option("--universe", universe, "node universe file");
    sub->add_option("--weight-mode", weight_mode, "fractional or unit")->capture_default_str();
  }
  TemporalEdgeLog load(Run& run) const {
    digest(run, edge_log);
    std::optional<NodeUniverse> u;
    if (!universe.empty()) {
      digest(run, universe);
      u = io::read_universe(universe);
    }
    return io::read_edge_log(edge_log, u, parse_weight_mode(weight_mode));
  }
};

Time resolve_until(const TemporalEdgeLog& log, const std::optional<Time>& until) {
  if (log.empty()) throw DataError("edge log has no events");
  return until ? *until : log.last_time();
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string profile;
  std::optional<double> alpha, lambda;
  std::optional<std::size_t> m, nodes, eligible, horizon, events_per_period;
  std::optional<std::string> weight_mode;
  std::string universe;
  std::uint64_t seed = 0;
};

pwa::SimConfig sim_config(const SimulateArgs& a, Run& run) {
  pwa::SimConfig c;
  if (!a.profile.empty()) {
    if (a.profile != "sweden") throw UsageError("unknown profile '" + a.profile + "'");
    c = pwa::sweden_profile();
  } else {
    c.alpha = 1.0;
    c.lambda = 1.0;
    c.m = 1;
    c.nodes = NodeUniverse::numbered(10, 10);
    c.horizon = 1000;
  }
  if (a.alpha) c.alpha = *a.alpha;
  if (a.lambda) c.lambda = *a.lambda;
  if (a.m) c.m = *a.m;
  if (a.horizon) c.horizon = *a.horizon;
  if (a.events_per_period) c.events_per_period = *a.events_per_period;
  if (a.weight_mode) c.weight_mode = parse_weight_mode(*a.weight_mode);
  if (!a.universe.empty()) {
    digest(run, a.universe);
    c.nodes = io::read_universe(a.universe);
  } else if (a.nodes || a.eligible) {
    const std::size_t n = a.nodes.value_or(c.nodes.size());
    const std::size_t e = a.eligible.value_or(n);
    if (e > n) throw UsageError("--eligible exceeds --nodes");
    c.nodes = NodeUniverse::numbered(n, e);
  }
  c.edge_universe = c.nodes.eligible_pairs();
  c.seed = a.seed;
  c.validate();
  return c;
}

void record_config(Run& run, const pwa::SimConfig& c) {
  run.param("sim.alpha", c.alpha);
  run.param("sim.lambda", c.lambda);
  run.param("sim.m", std::to_string(c.m));
  run.param("sim.nodes", std::to_string(c.nodes.size()));
  run.param("sim.eligible_sources", std::to_string(c.nodes.eligible_sources().size()));
  run.param("sim.edge_universe", std::to_string(c.edge_universe.size()));
  run.param("sim.horizon", std::to_string(c.horizon));
  run.param("sim.weight_mode", to_string(c.weight_mode));
  run.param("sim.events_per_period", std::to_string(c.events_per_period));
  run.manifest.seed = c.seed;
}

void cmd_simulate(const SimulateArgs& a, Run& run) {
  const pwa::SimConfig c = sim_config(a, run);
  record_config(run, c);
  const TemporalEdgeLog log = pwa::simulate(c);
  run.write("edge_log.csv", [&](std::ostream& o) { io::write_edge_log(o, log); });
  run.write("universe.csv", [&](std::ostream& o) { io::write_universe(o, c.nodes); });
  // mu is taken on the final snapshot.
  const double mu = pwa::estimate_mu(log, c.lambda);
  run.param("mu_final_snapshot", mu);
  run.param("kappa", pwa::stretched_kappa(c.alpha, static_cast<double>(c.m), mu));
  *run.console << "simulated " << log.size() << " innovations over " << c.edge_universe.size()
               << " pairs\n";
}

// ---------------------------------------------------------------- fit

struct TwoStepArgs {
  LogInput input;
  Time kernel_window = 0;
  Time fit_from = 0;
  std::string step1 = "weight_classes";
  std::string step2 = "positive";
  std::string se = "hc1";
};

stats::TwoStepOptions two_step_options(const TwoStepArgs& a) {
  stats::TwoStepOptions o;
  o.kernel_window = a.kernel_window;
  o.fit_from = a.fit_from;
  if (a.step1 == "weight_classes") o.step1 = stats::KernelStep::weight_classes;
  else if (a.step1 == "pairwise") o.step1 = stats::KernelStep::pairwise;
  else throw UsageError("--step1 must be weight_classes or pairwise");
  if (a.step2 == "positive") o.step2 = stats::Step2Sample::positive;
  else if (a.step2 == "universe") o.step2 = stats::Step2Sample::universe;
  else throw UsageError("--step2 must be positive or universe");
  o.se = stats::parse_se_type(a.se);
  return o;
}

void emit_two_step(Run& run, const TemporalEdgeLog& log, const stats::TwoStepOptions& o,
                   const std::string& prefix) {
  const stats::TwoStepFit fit = stats::two_step_pwa_fit(log, o);
  run.write(prefix + "fit.txt", [&](std::ostream& f) {
    f << "[two_step]\n";
    f << "lambda_hat=" << format_double(fit.lambda_hat) << '\n';
    f << "alpha_hat=" << format_double(fit.alpha_hat) << '\n';
    f << "windows=" << fit.windows << '\n';
    write_regression(f, "step1", fit.step1);
    write_regression(f, "step2", fit.step2);
  });
  const auto per_window = stats::per_window_lambda(log, o);
  run.write(prefix + "lambda_by_window.csv", [&](std::ostream& f) {
    f << "window_start,lambda_hat\n";
    for (const auto& [t, l] : per_window) f << t << ',' << format_double(l) << '\n';
  });
  *run.console << "lambda_hat=" << format_double(fit.lambda_hat)
               << " alpha_hat=" << format_double(fit.alpha_hat) << '\n';
}

void cmd_two_step(const TwoStepArgs& a, Run& run) {
  const TemporalEdgeLog log = a.input.load(run);
  emit_two_step(run, log, two_step_options(a), "");
}

struct EvolutionArgs {
  LogInput input;
  std::vector<std::string> proximities;  // kind=path
  std::string spec = "linear";
  std::string effects = "none";
  Time period_length = 1;
  bool time_dummies = false;
  std::string se = "hc1";
};

void cmd_evolution(const EvolutionArgs& a, Run& run) {
  const TemporalEdgeLog log = a.input.load(run);
  std::vector<econ::ProximityMatrix> z;
  for (const std::string& item : a.proximities) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("--proximity expects kind=path, got '" + item + "'");
    const std::string path = item.substr(eq + 1);
    if (!fs::exists(path)) throw DataError("cannot read '" + path + "'");
    digest(run, path);
    z.push_back(io::read_proximity(path, econ::parse_proximity_kind(item.substr(0, eq))));
  }
  stats::EvolutionOptions o;
  o.spec = stats::parse_evolution_spec(a.spec);
  o.effects = stats::parse_effects(a.effects);
  o.period_length = a.period_length;
  o.time_dummies = a.time_dummies;
  o.se = stats::parse_se_type(a.se);
  const auto r = stats::evolution_regression(log, z, o);
  run.write("fit.txt", [&](std::ostream& f) { write_regression(f, "evolution", r); });
  *run.console << "evolution " << a.spec << ": n=" << r.n_obs << " r2=" << format_double(r.r_squared) << '\n';
}

struct StimulusFitArgs {
  LogInput input;
  Time period_length = 1;
  std::string effects = "none";
  bool time_dummies = false;
  std::string se = "hc1";
};

void cmd_fit_stimulus(const StimulusFitArgs& a, Run& run) {
  const TemporalEdgeLog log = a.input.load(run);
  const auto panel = predict::stimulus_panel(log, a.period_length);
  stats::StimulusOptions o;
  o.effects = stats::parse_effects(a.effects);
  o.time_dummies = a.time_dummies;
  o.se = stats::parse_se_type(a.se);
  const auto r = stats::stimulus_regression(panel, o);
  run.write("fit.txt", [&](std::ostream& f) { write_regression(f, "stimulus", r); });
  *run.console << "stimulus: n=" << r.n_obs << " r2=" << format_double(r.r_squared) << '\n';
}

// ---------------------------------------------------------------- metrics / predict

struct MetricsArgs {
  LogInput input;
  std::optional<Time> until;
  std::string predictors = "pwa,pa,common_neighbors,jaccard,adamic_adar,katz";
  double beta = 20.0;
  std::string neighborhood = "undirected";
  std::uint64_t seed = 0;
};

metrics::Neighborhood parse_neighborhood(const std::string& text) {
  if (text == "undirected") return metrics::Neighborhood::undirected;
  if (text == "out") return metrics::Neighborhood::out;
  throw UsageError("--neighborhood must be undirected or out");
}

std::vector<std::string> checked_predictors(const std::string& list) {
  const auto names = split_list(list);
  if (names.empty()) throw UsageError("--predictors is empty");
  const auto& known = metrics::predictor_names();
  for (const auto& n : names)
    if (std::find(known.begin(), known.end(), n) == known.end())
      throw UsageError("unknown predictor '" + n + "'");
  return names;
}

void cmd_metrics(const MetricsArgs& a, Run& run) {
  const TemporalEdgeLog log = a.input.load(run);
  const Time until = resolve_until(log, a.until);
  run.param("resolved_until", std::to_string(until));
  const WeightedDigraph g = snapshot(log, until);
  metrics::PredictorOptions po;
  po.katz.beta = a.beta;
  po.neighborhood = parse_neighborhood(a.neighborhood);
  po.random_seed = a.seed;
  run.manifest.seed = a.seed;
  const BoolMatrix mask = source_mask(log.nodes());
  for (const auto& name : checked_predictors(a.predictors)) {
    ScoreMatrix s = metrics::score_by_name(name, g, po);
    s.eligible = mask;
    run.write("scores_" + name + ".csv", [&](std::ostream& o) { io::write_score_matrix(o, s, log.nodes()); });
    if (name == "katz") {
      const auto k = metrics::katz(g, po.katz);
      const auto parts = metrics::katz_decompose(k.scores.scores, k.walk_matrix, a.beta);
      run.param("katz.spectral_radius", k.radius.value);
      run.write("katz_parts.csv", [&](std::ostream& o) {
        o << "source,target,total,direct,indirect\n";
        for (const EdgePair& p : s.eligible_pairs()) {
          const auto i = static_cast<Eigen::Index>(p.source);
          const auto j = static_cast<Eigen::Index>(p.target);
          o << log.nodes().id(p.source) << ',' << log.nodes().id(p.target) << ','
            << format_double(k.scores.scores(i, j)) << ',' << format_double(parts.direct(i, j)) << ','
            << format_double(parts.indirect(i, j)) << '\n';
        }
      });
    }
  }
  *run.console << "scored " << mask.count() << " eligible pairs at time " << until << '\n';
}

struct PredictArgs {
  LogInput input;
  std::string predictors = "pwa,pa,common_neighbors,jaccard,adamic_adar,katz,random";
  Time period_length = 1;
  double beta = 20.0;
  std::string neighborhood = "undirected";
  std::uint64_t seed = 0;
  std::optional<Time> first, last;
};

void emit_rolling(Run& run, const TemporalEdgeLog& log, const predict::RollingOptions& o,
                  const std::string& prefix) {
  const auto report = predict::rolling_eval(log, o);
  run.write(prefix + "predict.csv", [&](std::ostream& f) {
    f << "year,predictor,N,tp,fp,tn,fn,accuracy,precision\n";
    for (const auto& r : report.rows)
      f << r.period_start << ',' << r.predictor << ',' << r.n << ',' << r.counts.tp << ','
        << r.counts.fp << ',' << r.counts.tn << ',' << r.counts.fn << ','
        << format_double(r.accuracy) << ',' << format_double(r.precision) << '\n';
  });
  run.write(prefix + "predict_notes.txt", [&](std::ostream& f) {
    for (const auto& n : report.notes) f << n << '\n';
  });
  std::map<std::string, std::pair<double, std::size_t>> mean;
  for (const auto& r : report.rows) {
    mean[r.predictor].first += r.precision;
    ++mean[r.predictor].second;
  }
  for (const auto& name : o.predictors)
    if (mean.contains(name))
      *run.console << "mean precision " << name << ' '
                   << format_double(mean[name].first / static_cast<double>(mean[name].second)) << '\n';
}

void cmd_predict(const PredictArgs& a, Run& run) {
  const TemporalEdgeLog log = a.input.load(run);
  predict::RollingOptions o;
  o.predictors = checked_predictors(a.predictors);
  o.predictor_options.katz.beta = a.beta;
  o.predictor_options.neighborhood = parse_neighborhood(a.neighborhood);
  o.predictor_options.random_seed = a.seed;
  o.period_length = a.period_length;
  o.first_period_start = a.first;
  o.last_period_start = a.last;
  run.manifest.seed = a.seed;
  emit_rolling(run, log, o, "");
}

// ---------------------------------------------------------------- stimulus

struct StimulusArgs {
  LogInput input;
  Time period_length = 1;
};

void write_panel(std::ostream& f, const predict::StimulusPanel& panel) {
  f << "industry,period,period_start,x,x_forward,x_backward\n";
  for (const auto& r : panel.rows)
    f << panel.nodes.id(r.industry) << ',' << r.period << ',' << r.period_start << ','
      << format_double(r.x) << ',' << format_double(r.x_forward) << ',' << format_double(r.x_backward)
      << '\n';
}

void cmd_stimulus(const StimulusArgs& a, Run& run) {
  const TemporalEdgeLog log = a.input.load(run);
  const auto panel = predict::stimulus_panel(log, a.period_length);
  run.write("stimulus_panel.csv", [&](std::ostream& f) { write_panel(f, panel); });
  *run.console << "stimulus panel: " << panel.rows.size() << " rows\n";
}

// ---------------------------------------------------------------- econ

struct EconArgs {
  std::string table;
  std::string map;
  std::string matrix;
  std::string kind = "leontief";
  bool drop_diagonal = false;
  std::string orientation = "rows";
  double g = 1.0;
};

void cmd_econ(const EconArgs& a, Run& run) {
  const auto kind = econ::parse_proximity_kind(a.kind);
  econ::ProximityMatrix p;
  if (kind == econ::ProximityKind::skill) {
    if (a.matrix.empty()) throw UsageError("--kind skill reads an exogenous --matrix");
    digest(run, a.matrix);
    p = io::read_proximity(a.matrix, kind);
  } else {
    if (a.table.empty()) throw UsageError("--table is required for kind " + a.kind);
    digest(run, a.table);
    const econ::IoTable t = io::read_io_table(a.table);
    switch (kind) {
      case econ::ProximityKind::leontief: p = econ::leontief(t, a.drop_diagonal); break;
      case econ::ProximityKind::rd_flows: p = econ::rd_flows(t); break;
      case econ::ProximityKind::los: {
        econ::LosOrientation o;
        if (a.orientation == "rows") o = econ::LosOrientation::rows;
        else if (a.orientation == "columns") o = econ::LosOrientation::columns;
        else throw UsageError("--orientation must be rows or columns");
        p = {kind, t.sector_ids, econ::los_index(t.a, o)};
        break;
      }
      case econ::ProximityKind::gravity:
        if (t.value_added.size() == 0) throw DataError("gravity needs block=m (value added) in the table");
        p = {kind, t.sector_ids, econ::gravity(t.value_added, a.g)};
        break;
      case econ::ProximityKind::skill: break;
    }
    run.param("spectral_radius_A", spectral_radius(t.a).value);
  }
  std::vector<std::string> warnings;
  if (!a.map.empty()) {
    digest(run, a.map);
    auto mapped = econ::apply_mapping(p, io::read_mapping(a.map));
    p = std::move(mapped.matrix);
    warnings = std::move(mapped.warnings);
  }
  run.write("proximity_" + a.kind + ".csv", [&](std::ostream& f) { io::write_proximity(f, p); });
  run.write("warnings.txt", [&](std::ostream& f) {
    for (const auto& w : warnings) f << w << '\n';
  });
  for (const auto& w : warnings) *run.console << "warning: " << w << '\n';
  *run.console << a.kind << ": " << p.ids.size() << "x" << p.ids.size() << " matrix\n";
}

// ---------------------------------------------------------------- structure

struct StructureArgs {
  LogInput input;
  std::optional<Time> until;
  double alpha = 0.855;
  double lambda = 0.649;
  double m = 2.0;
  double w_min = 1.0;
};

void write_ccdf(std::ostream& f, const CcdfSeries& s) {
  f << "value,ccdf\n";
  for (const auto& p : s) f << format_double(p.value) << ',' << format_double(p.prob) << '\n';
}

std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
  std::vector<double> out;
  if (!(lo > 0.0) || !(hi >= lo)) return out;
  for (std::size_t k = 0; k < count; ++k) {
    const double t = count == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(count - 1);
    out.push_back(std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))));
  }
  return out;
}

void emit_structure(Run& run, const TemporalEdgeLog& log, Time until, const StructureArgs& a,
                    const std::string& prefix) {
  const WeightedDigraph g = snapshot(log, until);
  std::vector<std::string> notes;
  auto positive = [](const Eigen::VectorXd& v) {
    std::vector<double> out;
    for (Eigen::Index i = 0; i < v.size(); ++i)
      if (v[i] > 0.0) out.push_back(v[i]);
    return out;
  };
  auto emit_ccdf = [&](const std::string& name, const std::vector<double>& values) {
    if (values.empty()) {
      notes.push_back(name + ": no positive values");
      return;
    }
    run.write(prefix + name + ".csv", [&](std::ostream& f) { write_ccdf(f, ccdf(values)); });
  };
  emit_ccdf("strength_out_ccdf", positive(g.out_strength()));
  emit_ccdf("strength_in_ccdf", positive(g.in_strength()));

  const auto universe = log.nodes().eligible_pairs();
  const CcdfSeries wc = pwa::weight_ccdf(g, universe);
  if (wc.empty()) throw DataError("structure: no positive weights up to time " + std::to_string(until));
  run.write(prefix + "weight_ccdf.csv", [&](std::ostream& f) { write_ccdf(f, wc); });

  // Theoretical overlays, each scaled to the empirical tail.
  std::optional<pwa::PowerLawTail> linear;
  std::optional<pwa::StretchedExponentialTail> stretched;
  try {
    linear = pwa::theoretical_ccdf_linear(a.alpha, 1.0);
    linear->scale = pwa::fit_scale(wc, *linear, a.w_min);
  } catch (const Error& e) {
    notes.push_back(std::string("power-law overlay skipped: ") + e.what());
    linear.reset();
  }
  double mu = 0.0;
  try {
    mu = pwa::estimate_mu(log, a.lambda);
    const double kappa = pwa::stretched_kappa(a.alpha, a.m, mu);
    stretched = pwa::theoretical_ccdf_sublinear(a.lambda, kappa, 1.0);
    stretched->scale = pwa::fit_scale(wc, *stretched, a.w_min);
    run.param(prefix + "mu_final_snapshot", mu);
    run.param(prefix + "kappa", kappa);
  } catch (const Error& e) {
    notes.push_back(std::string("stretched-exponential overlay skipped: ") + e.what());
    stretched.reset();
  }
  const auto grid = log_spaced(std::max(a.w_min, wc.front().value), wc.back().value, 200);
  run.write(prefix + "weight_overlays.csv", [&](std::ostream& f) {
    f << "w,power_law,stretched_exponential\n";
    for (double w : grid)
      f << format_double(w) << ',' << (linear ? format_double((*linear)(w)) : "") << ','
        << (stretched ? format_double((*stretched)(w)) : "") << '\n';
  });

  std::optional<pwa::TailFit> pl, se;
  try {
    pl = pwa::fit_power_law_tail(wc, a.w_min);
  } catch (const Error& e) {
    notes.push_back(std::string("power-law tail fit skipped: ") + e.what());
  }
  try {
    se = pwa::fit_stretched_tail(wc, a.lambda, a.w_min);
  } catch (const Error& e) {
    notes.push_back(std::string("stretched tail fit skipped: ") + e.what());
  }

  run.write(prefix + "clustering.csv", [&](std::ostream& f) {
    f << "degree,clustering\n";
    for (const auto& [k, c] : clustering_spectrum(g)) f << k << ',' << format_double(c) << '\n';
  });
  std::optional<double> transitivity;
  try {
    transitivity = global_transitivity(g);
  } catch (const NumericError& e) {
    notes.push_back(std::string("transitivity undefined: ") + e.what());
  }
  const Partition part = greedy_communities(g);
  run.write(prefix + "communities.csv", [&](std::ostream& f) {
    f << "node,community\n";
    for (std::size_t i = 0; i < part.assignment.size(); ++i)
      f << log.nodes().id(i) << ',' << part.assignment[i] << '\n';
  });
  run.write(prefix + "structure.txt", [&](std::ostream& f) {
    f << "[structure]\n";
    f << "until=" << until << '\n';
    f << "nodes=" << g.size() << '\n';
    f << "positive_pairs=" << pwa::weight_histogram(g, universe).positive_edges() << '\n';
    f << "total_weight=" << format_double(g.total_weight()) << '\n';
    if (transitivity) f << "global_transitivity=" << format_double(*transitivity) << '\n';
    f << "communities=" << part.community_count() << '\n';
    f << "modularity=" << format_double(part.modularity) << '\n';
    if (pl) {
      f << "power_law_tail.slope=" << format_double(pl->slope) << '\n';
      f << "power_law_tail.r2=" << format_double(pl->r_squared) << '\n';
    }
    if (se) {
      f << "stretched_tail.slope=" << format_double(se->slope) << '\n';
      f << "stretched_tail.r2=" << format_double(se->r_squared) << '\n';
    }
    for (const auto& n : notes) f << "note=" << n << '\n';
  });
  *run.console << "structure: " << part.community_count() << " communities, modularity "
               << format_double(part.modularity) << '\n';
}

void cmd_structure(const StructureArgs& a, Run& run) {
  const TemporalEdgeLog log = a.input.load(run);
  const Time until = resolve_until(log, a.until);
  run.param("resolved_until", std::to_string(until));
  emit_structure(run, log, until, a, "");
}

// ---------------------------------------------------------------- report

struct ReportArgs {
  std::uint64_t seed = 0;
  std::size_t horizon = 20000;
  std::size_t periods = 20;
};

void cmd_report(const ReportArgs& a, Run& run) {
  if (a.periods < 3) throw UsageError("--periods must be at least 3");
  pwa::SimConfig c = pwa::sweden_profile();
  c.horizon = a.horizon;
  c.seed = a.seed;
  c.validate();
  record_config(run, c);
  const TemporalEdgeLog log = pwa::simulate(c);
  run.write("edge_log.csv", [&](std::ostream& o) { io::write_edge_log(o, log); });
  run.write("universe.csv", [&](std::ostream& o) { io::write_universe(o, c.nodes); });

  emit_two_step(run, log, stats::TwoStepOptions{}, "two_step_");

  StructureArgs sa;
  sa.alpha = c.alpha;
  sa.lambda = c.lambda;
  sa.m = static_cast<double>(c.m);
  emit_structure(run, log, log.last_time(), sa, "structure_");

  const Time period = std::max<Time>(1, (log.last_time() - log.first_time() + 1) /
                                            static_cast<Time>(a.periods));
  run.param("report.period_length", std::to_string(period));

  // Katz damping kept inside its convergence region on this network.
  const WeightedDigraph g = snapshot(log, log.last_time());
  const double rho = spectral_radius(g.weights() / g.total_weight()).upper;
  const double beta = rho > 0.0 ? std::min(20.0, 0.5 / rho) : 20.0;
  run.param("report.katz_beta", beta);
  predict::RollingOptions ro;
  ro.predictors = {"pwa", "pa", "common_neighbors", "jaccard", "adamic_adar", "katz", "random"};
  ro.predictor_options.katz.beta = beta;
  ro.predictor_options.random_seed = a.seed;
  ro.period_length = period;
  emit_rolling(run, log, ro, "");

  const auto panel = predict::stimulus_panel(log, period);
  run.write("stimulus_panel.csv", [&](std::ostream& f) { write_panel(f, panel); });
  stats::StimulusOptions so;
  so.effects = stats::Effects::fixed;
  so.time_dummies = true;
  const auto stim = stats::stimulus_regression(panel, so);
  stats::EvolutionOptions eo;
  eo.period_length = period;
  const auto evo = stats::evolution_regression(log, {}, eo);
  run.write("regressions.txt", [&](std::ostream& f) {
    write_regression(f, "stimulus", stim);
    write_regression(f, "evolution", evo);
  });
  *run.console << "report written to " << run.out.string() << '\n';
}

// ---------------------------------------------------------------- dispatch

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, int depth);

int replay(const std::string& manifest_path, const std::string& out_override, std::ostream& out,
           std::ostream& err, int depth) {
  if (depth > 0) throw UsageError("a replayed manifest cannot itself be a replay");
  const io::RunManifest m = io::read_manifest(manifest_path);
  for (const auto& [path, sha] : m.digests) {
    if (!fs::exists(path)) throw DataError("replay: input '" + path + "' is missing");
    if (io::sha256_file(path) != sha) throw DataError("replay: input '" + path + "' changed since the run");
  }
  std::vector<std::string> argv = m.argv;
  if (!out_override.empty()) {
    for (std::size_t i = 0; i < argv.size(); ++i) {
      if (argv[i] == "--out" && i + 1 < argv.size()) argv[i + 1] = out_override;
      else if (argv[i].rfind("--out=", 0) == 0) argv[i] = "--out=" + out_override;
    }
  }
  return dispatch(argv, out, err, depth + 1);
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, int depth) {
  CLI::App app{"innoflow: innovation-flow network simulation, estimation and link prediction"};
  app.name("innoflow");
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  std::string out_dir;
  auto add_out = [&](CLI::App* sub) { sub->add_option("--out", out_dir, "output directory")->required(); };

  SimulateArgs sim;
  auto* s_sim = app.add_subcommand("simulate", "run the preferential weight assignment process");
  s_sim->add_option("--profile", sim.profile, "named parameter profile (sweden)");
  s_sim->add_option("--alpha", sim.alpha, "preferential share in (0, 1]");
  s_sim->add_option("--lambda", sim.lambda, "kernel exponent in (0, 1]");
  s_sim->add_option("--m", sim.m, "distinct pairs per innovation");
  s_sim->add_option("--nodes", sim.nodes, "node count for a numbered universe");
  s_sim->add_option("--eligible", sim.eligible, "eligible sources among the numbered nodes");
  s_sim->add_option("--universe", sim.universe, "node universe file");
  s_sim->add_option("--horizon", sim.horizon, "number of innovations");
  s_sim->add_option("--events-per-period", sim.events_per_period, "innovations per time stamp");
  s_sim->add_option("--weight-mode", sim.weight_mode, "fractional or unit");
  s_sim->add_option("--seed", sim.seed, "random seed")->required();
  add_out(s_sim);

  auto* s_fit = app.add_subcommand("fit", "estimation designs");
  s_fit->require_subcommand(1);
  TwoStepArgs ts;
  auto* f_ts = s_fit->add_subcommand("pwa-two-step", "two-step kernel exponent and preferential share");
  ts.input.add(f_ts);
  f_ts->add_option("--kernel-window", ts.kernel_window, "time units per step-1 window, 0 = automatic");
  f_ts->add_option("--fit-from", ts.fit_from, "earlier events only set prior weights");
  f_ts->add_option("--step1", ts.step1, "weight_classes or pairwise");
  f_ts->add_option("--step2", ts.step2, "positive or universe");
  f_ts->add_option("--se", ts.se, "classic or hc1");
  add_out(f_ts);

  EvolutionArgs ev;
  auto* f_ev = s_fit->add_subcommand("evolution", "relative-flow regressions on pair panels");
  ev.input.add(f_ev);
  f_ev->add_option("--proximity", ev.proximities, "kind=path of a proximity matrix (repeatable)");
  f_ev->add_option("--spec", ev.spec, "linear, logit or loglog");
  f_ev->add_option("--effects", ev.effects, "none or fixed");
  f_ev->add_option("--period-length", ev.period_length, "time units per period");
  f_ev->add_flag("--time-dummies", ev.time_dummies, "add period dummies");
  f_ev->add_option("--se", ev.se, "classic, hc1 or cluster");
  add_out(f_ev);

  StimulusFitArgs sf;
  auto* f_st = s_fit->add_subcommand("stimulus", "network stimulus regression");
  sf.input.add(f_st);
  f_st->add_option("--period-length", sf.period_length, "time units per period");
  f_st->add_option("--effects", sf.effects, "none or fixed");
  f_st->add_flag("--time-dummies", sf.time_dummies, "add period dummies");
  f_st->add_option("--se", sf.se, "classic, hc1 or cluster");
  add_out(f_st);

  MetricsArgs me;
  auto* s_me = app.add_subcommand("metrics", "similarity scores on a snapshot");
  me.input.add(s_me);
  s_me->add_option("--until", me.until, "last time stamp in the snapshot (default: end of log)");
  s_me->add_option("--predictors", me.predictors, "comma-separated predictor names");
  s_me->add_option("--beta", me.beta, "Katz damping");
  s_me->add_option("--neighborhood", me.neighborhood, "undirected or out");
  s_me->add_option("--seed", me.seed, "seed of the random baseline");
  add_out(s_me);

  PredictArgs pr;
  auto* s_pr = app.add_subcommand("predict", "rolling top-N link prediction");
  pr.input.add(s_pr);
  s_pr->add_option("--predictors", pr.predictors, "comma-separated predictor names");
  s_pr->add_option("--period-length", pr.period_length, "time units per period");
  s_pr->add_option("--beta", pr.beta, "Katz damping");
  s_pr->add_option("--neighborhood", pr.neighborhood, "undirected or out");
  s_pr->add_option("--seed", pr.seed, "seed of the random baseline")->required();
  s_pr->add_option("--first", pr.first, "first evaluated period start");
  s_pr->add_option("--last", pr.last, "last evaluated period start");
  add_out(s_pr);

  StimulusArgs st;
  auto* s_st = app.add_subcommand("stimulus", "network stimulus panel");
  st.input.add(s_st);
  s_st->add_option("--period-length", st.period_length, "time units per period");
  add_out(s_st);

  EconArgs ec;
  auto* s_ec = app.add_subcommand("econ", "proximity matrices from input-output data");
  s_ec->add_option("--table", ec.table, "input-output table file");
  s_ec->add_option("--map", ec.map, "sector-to-node mapping file");
  s_ec->add_option("--matrix", ec.matrix, "exogenous matrix (kind skill)");
  s_ec->add_option("--kind", ec.kind, "leontief, rd_flows, los, gravity or skill");
  s_ec->add_flag("--drop-diagonal", ec.drop_diagonal, "zero the Leontief diagonal");
  s_ec->add_option("--orientation", ec.orientation, "Los index vectors: rows or columns");
  s_ec->add_option("--g", ec.g, "gravity constant");
  add_out(s_ec);

  StructureArgs sa;
  auto* s_sa = app.add_subcommand("structure", "distributions, clustering and communities");
  sa.input.add(s_sa);
  s_sa->add_option("--until", sa.until, "last time stamp in the snapshot (default: end of log)");
  s_sa->add_option("--alpha", sa.alpha, "alpha of the overlays");
  s_sa->add_option("--lambda", sa.lambda, "lambda of the overlays");
  s_sa->add_option("--m", sa.m, "m of the overlays");
  s_sa->add_option("--w-min", sa.w_min, "tail cutoff for fits and overlays");
  add_out(s_sa);

  ReportArgs ra;
  auto* s_ra = app.add_subcommand("report", "bundled desk-scale reproduction run");
  s_ra->add_option("--seed", ra.seed, "random seed")->required();
  s_ra->add_option("--horizon", ra.horizon, "innovations to simulate");
  s_ra->add_option("--periods", ra.periods, "evaluation periods");
  add_out(s_ra);

  std::string manifest_path;
  auto* s_rp = app.add_subcommand("replay", "rerun the command recorded in a manifest");
  s_rp->add_option("manifest", manifest_path, "manifest.txt of an earlier run")->required();
  s_rp->add_option("--out", out_dir, "output directory (default: as recorded)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  if (s_rp->parsed()) return replay(manifest_path, out_dir, out, err, depth);

  CLI::App* leaf = app.get_subcommands().front();
  std::string command = leaf->get_name();
  if (leaf == s_fit) {
    leaf = s_fit->get_subcommands().front();
    command += " " + leaf->get_name();
  }

  Run run;
  run.out = out_dir;
  run.console = &out;
  run.manifest.command = command;
  run.manifest.argv = args;
  run.manifest.timestamp = io::manifest_timestamp();
  record_options(leaf, run.manifest);
  prepare_out(run.out);

  if (leaf == s_sim) cmd_simulate(sim, run);
  else if (leaf == f_ts) cmd_two_step(ts, run);
  else if (leaf == f_ev) cmd_evolution(ev, run);
  else if (leaf == f_st) cmd_fit_stimulus(sf, run);
  else if (leaf == s_me) cmd_metrics(me, run);
  else if (leaf == s_pr) cmd_predict(pr, run);
  else if (leaf == s_st) cmd_stimulus(st, run);
  else if (leaf == s_ec) cmd_econ(ec, run);
  else if (leaf == s_sa) cmd_structure(sa, run);
  else if (leaf == s_ra) cmd_report(ra, run);

  run.write("manifest.txt", [&](std::ostream& f) { io::write_manifest(f, run.manifest); });
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err, 0);
  } catch (const Error& e) {
    const char* kind = e.kind() == ErrorKind::usage ? "usage" : e.kind() == ErrorKind::data ? "data" : "numeric";
    err << error_line(kind, e.exit_code(), e.what()) << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    err << error_line("data", 3, e.what()) << '\n';
    return 3;
  }
}

}  // namespace innoflow::cli
