#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "innoflow/error.hpp"
#include "innoflow/stats.hpp"

namespace innoflow::stats {

std::string to_string(SeType se) {
  switch (se) {
    case SeType::classic: return "classic";
    case SeType::hc1: return "hc1";
    case SeType::cluster: return "cluster";
  }
  return "unknown";
}

SeType parse_se_type(const std::string& text) {
  if (text == "classic") return SeType::classic;
  if (text == "hc1") return SeType::hc1;
  if (text == "cluster") return SeType::cluster;
  throw UsageError("unknown standard-error type '" + text + "'");
}

DesignMatrix DesignMatrix::with_intercept() const {
  DesignMatrix out;
  out.names.reserve(names.size() + 1);
  out.names.push_back("const");
  out.names.insert(out.names.end(), names.begin(), names.end());
  out.x.resize(x.rows(), x.cols() + 1);
  out.x.col(0).setOnes();
  out.x.rightCols(x.cols()) = x;
  out.y = y;
  out.groups = groups;
  return out;
}

void DesignMatrix::validate() const {
  if (static_cast<std::size_t>(x.cols()) != names.size())
    throw DataError("design matrix: " + std::to_string(x.cols()) + " columns but " +
                    std::to_string(names.size()) + " names");
  if (x.rows() != y.size()) throw DataError("design matrix: x and y differ in length");
  if (!groups.empty() && groups.size() != rows())
    throw DataError("design matrix: group labels differ in length from the data");
  if (!x.allFinite() || !y.allFinite()) throw DataError("design matrix has non-finite entries");
}

Eigen::VectorXd RegressionResult::standard_errors() const {
  return covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
}

std::size_t RegressionResult::index_of(const std::string& name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw UsageError("no coefficient named '" + name + "'");
  return static_cast<std::size_t>(it - names.begin());
}

double RegressionResult::coefficient(const std::string& name) const {
  return coefficients[static_cast<Eigen::Index>(index_of(name))];
}

double RegressionResult::standard_error(const std::string& name) const {
  const auto k = static_cast<Eigen::Index>(index_of(name));
  return std::sqrt(std::max(0.0, covariance(k, k)));
}

namespace {

bool has_const(const DesignMatrix& d) {
  return std::find(d.names.begin(), d.names.end(), "const") != d.names.end();
}

// Sandwich meat for the requested estimator; `scores` holds x_i * e_i rows.
Eigen::MatrixXd meat(const Eigen::MatrixXd& scores, SeType se,
                     const std::vector<std::int64_t>& groups) {
  if (se == SeType::cluster) {
    if (groups.empty()) throw UsageError("clustered standard errors need group labels");
    std::map<std::int64_t, Eigen::VectorXd> sums;
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
      auto [it, fresh] = sums.try_emplace(groups[static_cast<std::size_t>(i)]);
      if (fresh) it->second = Eigen::VectorXd::Zero(scores.cols());
      it->second += scores.row(i).transpose();
    }
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(scores.cols(), scores.cols());
    for (const auto& [g, s] : sums) m += s * s.transpose();
    return m;
  }
  return scores.transpose() * scores;
}

std::size_t group_count(const std::vector<std::int64_t>& groups) {
  return std::set<std::int64_t>(groups.begin(), groups.end()).size();
}

}  // namespace

namespace detail {

RegressionResult ols_absorbed(const DesignMatrix& design, SeType se, std::size_t absorbed) {
  design.validate();
  const Eigen::Index n = design.x.rows();
  const Eigen::Index k = design.x.cols();
  if (k == 0) throw UsageError("regression without regressors");
  if (se == SeType::cluster && design.groups.empty())
    throw UsageError("clustered standard errors need group labels");
  if (n <= k + static_cast<Eigen::Index>(absorbed))
    throw NumericError("regression has " + std::to_string(n) + " observations for " +
                       std::to_string(k + static_cast<Eigen::Index>(absorbed)) + " parameters");

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design.x);
  qr.setThreshold(1e-12);
  if (qr.rank() < k) {
    std::string cols;
    for (Eigen::Index c = qr.rank(); c < k; ++c) {
      if (!cols.empty()) cols += ", ";
      cols += design.names[static_cast<std::size_t>(qr.colsPermutation().indices()[c])];
    }
    throw NumericError("design matrix is rank deficient; collinear columns: " + cols);
  }

  RegressionResult out;
  out.model = "ols";
  out.names = design.names;
  out.se_type = se;
  out.n_obs = static_cast<std::size_t>(n);
  out.coefficients = qr.solve(design.y);

  // (X'X)^-1 = P R^-1 R^-T P'.
  const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r_inv =
      r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
  const Eigen::MatrixXd perm = qr.colsPermutation();
  const Eigen::MatrixXd bread = perm * (r_inv * r_inv.transpose()) * perm.transpose();

  const Eigen::VectorXd e = design.y - design.x * out.coefficients;
  const double ssr = e.squaredNorm();
  const auto dof = static_cast<double>(n - k - static_cast<Eigen::Index>(absorbed));
  switch (se) {
    case SeType::classic:
      out.covariance = bread * (ssr / dof);
      break;
    case SeType::hc1: {
      const Eigen::MatrixXd scores = design.x.array().colwise() * e.array();
      out.covariance = bread * meat(scores, se, design.groups) * bread *
                       (static_cast<double>(n) / dof);
      break;
    }
    case SeType::cluster: {
      const Eigen::MatrixXd scores = design.x.array().colwise() * e.array();
      const auto g = static_cast<double>(group_count(design.groups));
      if (g < 2) throw NumericError("clustered standard errors need at least two clusters");
      out.covariance = bread * meat(scores, se, design.groups) * bread *
                       (g / (g - 1.0) * (static_cast<double>(n) - 1.0) / dof);
      break;
    }
  }
  out.covariance = (0.5 * (out.covariance + out.covariance.transpose())).eval();

  double tss = 0.0;
  if (has_const(design))
    tss = (design.y.array() - design.y.mean()).square().sum();
  else
    tss = design.y.squaredNorm();
  out.r_squared = tss > 0.0 ? 1.0 - ssr / tss : 0.0;
  return out;
}

}  // namespace detail

RegressionResult ols(const DesignMatrix& design, SeType se) {
  return detail::ols_absorbed(design, se, 0);
}

RegressionResult fixed_effects(const DesignMatrix& design, const std::vector<std::int64_t>& units,
                               const std::vector<std::vector<std::int64_t>>& dummy_factors,
                               SeType se, const std::vector<std::string>& factor_names) {
  design.validate();
  if (units.size() != design.rows()) throw DataError("fixed effects: unit labels differ in length");
  if (has_const(design)) throw UsageError("fixed effects design must not carry an intercept");
  for (const auto& f : dummy_factors)
    if (f.size() != design.rows()) throw DataError("fixed effects: dummy labels differ in length");
  if (!factor_names.empty() && factor_names.size() != dummy_factors.size())
    throw UsageError("fixed effects: one name per dummy factor");

  std::map<std::int64_t, std::size_t> unit_size;
  for (std::int64_t u : units) ++unit_size[u];
  std::vector<Eigen::Index> keep;
  std::size_t singletons = 0;
  for (std::size_t i = 0; i < units.size(); ++i) {
    if (unit_size[units[i]] < 2)
      ++singletons;
    else
      keep.push_back(static_cast<Eigen::Index>(i));
  }

  // Regressors followed by dummy blocks, rows restricted to kept units.
  std::vector<std::string> names = design.names;
  std::vector<std::map<std::int64_t, Eigen::Index>> dummy_cols(dummy_factors.size());
  Eigen::Index extra = 0;
  for (std::size_t f = 0; f < dummy_factors.size(); ++f) {
    std::set<std::int64_t> levels;
    for (Eigen::Index r : keep) levels.insert(dummy_factors[f][static_cast<std::size_t>(r)]);
    bool first = true;
    for (std::int64_t lv : levels) {
      if (first) {
        first = false;
        continue;
      }
      dummy_cols[f][lv] = design.x.cols() + extra++;
      names.push_back((factor_names.empty() ? "f" + std::to_string(f) : factor_names[f]) + "=" +
                      std::to_string(lv));
    }
  }

  const auto n = static_cast<Eigen::Index>(keep.size());
  DesignMatrix within;
  within.names = names;
  within.x = Eigen::MatrixXd::Zero(n, design.x.cols() + extra);
  within.y.resize(n);
  std::vector<std::int64_t> kept_units(static_cast<std::size_t>(n));
  for (Eigen::Index r = 0; r < n; ++r) {
    const Eigen::Index src = keep[static_cast<std::size_t>(r)];
    within.x.row(r).head(design.x.cols()) = design.x.row(src);
    within.y[r] = design.y[src];
    kept_units[static_cast<std::size_t>(r)] = units[static_cast<std::size_t>(src)];
    for (std::size_t f = 0; f < dummy_factors.size(); ++f) {
      auto it = dummy_cols[f].find(dummy_factors[f][static_cast<std::size_t>(src)]);
      if (it != dummy_cols[f].end()) within.x(r, it->second) = 1.0;
    }
    if (!design.groups.empty()) within.groups.push_back(design.groups[static_cast<std::size_t>(src)]);
  }

  // Demean within units.
  std::map<std::int64_t, std::vector<Eigen::Index>> members;
  for (Eigen::Index r = 0; r < n; ++r) members[kept_units[static_cast<std::size_t>(r)]].push_back(r);
  for (const auto& [u, rows] : members) {
    Eigen::RowVectorXd mx = Eigen::RowVectorXd::Zero(within.x.cols());
    double my = 0.0;
    for (Eigen::Index r : rows) {
      mx += within.x.row(r);
      my += within.y[r];
    }
    mx /= static_cast<double>(rows.size());
    my /= static_cast<double>(rows.size());
    for (Eigen::Index r : rows) {
      within.x.row(r) -= mx;
      within.y[r] -= my;
    }
  }

  RegressionResult out = detail::ols_absorbed(within, se, members.size());
  out.model = "fixed_effects";
  out.dropped_singletons = singletons;
  if (singletons > 0)
    out.warnings.push_back(std::to_string(singletons) + " singleton observations dropped");
  return out;
}

RegressionResult logit(const DesignMatrix& design, SeType se) {
  design.validate();
  const Eigen::Index n = design.x.rows();
  const Eigen::Index k = design.x.cols();
  for (Eigen::Index i = 0; i < n; ++i)
    if (design.y[i] != 0.0 && design.y[i] != 1.0) throw DataError("logit response must be 0 or 1");
  if (n <= k) throw NumericError("logit has too few observations");
  if (se == SeType::cluster && design.groups.empty())
    throw UsageError("clustered standard errors need group labels");

  auto log_lik = [&](const Eigen::VectorXd& eta) {
    double ll = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double t = eta[i];
      const double log1pexp = t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
      ll += design.y[i] * t - log1pexp;
    }
    return ll;
  };
  auto sigmoid = [](double t) {
    return t >= 0.0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
  };

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd eta = Eigen::VectorXd::Zero(n);
  double ll = log_lik(eta);
  std::ostringstream trace;
  bool converged = false;
  std::size_t iter = 0;
  Eigen::VectorXd p(n), w(n);
  for (iter = 1; iter <= 100; ++iter) {
    for (Eigen::Index i = 0; i < n; ++i) {
      p[i] = sigmoid(eta[i]);
      w[i] = std::max(p[i] * (1.0 - p[i]), 1e-300);
    }
    const Eigen::VectorXd sw = w.cwiseSqrt();
    const Eigen::MatrixXd wx = design.x.array().colwise() * sw.array();
    const Eigen::VectorXd z = (eta.array() + (design.y - p).array() / w.array()) * sw.array();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(wx);
    qr.setThreshold(1e-12);
    if (qr.rank() < k) {
      // weights start at 1/4, so rank lost later means probabilities hit 0 or 1
      if (iter > 1) throw NumericError("logit: quasi-complete separation detected (fitted probabilities reach 0 or 1)");
      throw NumericError("logit design is rank deficient");
    }
    const Eigen::VectorXd next_beta = qr.solve(z);
    const double step = (next_beta - beta).cwiseAbs().maxCoeff();
    beta = next_beta;
    eta = design.x * beta;
    const double next = log_lik(eta);
    const double gradient = (design.x.transpose() * (design.y - eta.unaryExpr(sigmoid))).cwiseAbs().maxCoeff();
    trace << " [" << iter << ": ll=" << next << " |grad|=" << gradient << "]";
    const double change = std::abs(next - ll);
    ll = next;
    // separated data creep: the likelihood flattens while beta keeps moving
    if (change < 1e-10 && gradient < 1e-8 && step < 1e-6 * (1.0 + beta.cwiseAbs().maxCoeff())) {
      converged = true;
      break;
    }
    if (eta.cwiseAbs().maxCoeff() > 40.0 && ll > -1e-6 * static_cast<double>(n))
      throw NumericError("logit: perfect separation detected (fitted probabilities reach 0 or 1)");
  }
  if (!converged && eta.cwiseAbs().maxCoeff() > 30.0)
    throw NumericError("logit: quasi-complete separation detected (coefficients keep growing)");
  if (!converged) throw NumericError("logit did not converge in 100 iterations:" + trace.str());

  RegressionResult out;
  out.model = "logit";
  out.names = design.names;
  out.se_type = se;
  out.n_obs = static_cast<std::size_t>(n);
  out.coefficients = beta;
  out.iterations = iter;
  out.log_likelihood = ll;
  for (Eigen::Index i = 0; i < n; ++i) {
    p[i] = sigmoid(eta[i]);
    w[i] = p[i] * (1.0 - p[i]);
  }
  const Eigen::MatrixXd info = design.x.transpose() * (design.x.array().colwise() * w.array()).matrix();
  const Eigen::MatrixXd bread = info.ldlt().solve(Eigen::MatrixXd::Identity(k, k));
  if (se == SeType::classic) {
    out.covariance = bread;
  } else {
    const Eigen::VectorXd resid = design.y - p;
    const Eigen::MatrixXd scores = design.x.array().colwise() * resid.array();
    double factor = static_cast<double>(n) / static_cast<double>(n - k);
    if (se == SeType::cluster) {
      const auto g = static_cast<double>(group_count(design.groups));
      if (g < 2) throw NumericError("clustered standard errors need at least two clusters");
      factor = g / (g - 1.0);
    }
    out.covariance = bread * meat(scores, se, design.groups) * bread * factor;
  }
  out.covariance = (0.5 * (out.covariance + out.covariance.transpose())).eval();

  const double ybar = design.y.mean();
  double ll0 = 0.0;
  if (has_const(design)) {
    if (ybar > 0.0 && ybar < 1.0)
      ll0 = static_cast<double>(n) * (ybar * std::log(ybar) + (1.0 - ybar) * std::log(1.0 - ybar));
  } else {
    ll0 = static_cast<double>(n) * std::log(0.5);
  }
  out.r_squared = ll0 < 0.0 ? 1.0 - ll / ll0 : 0.0;
  return out;
}

}  // namespace innoflow::stats
