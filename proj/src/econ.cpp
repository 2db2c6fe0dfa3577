#include "innoflow/econ.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "innoflow/error.hpp"

namespace innoflow::econ {

std::string to_string(ProximityKind kind) {
  switch (kind) {
    case ProximityKind::leontief: return "leontief";
    case ProximityKind::rd_flows: return "rd_flows";
    case ProximityKind::los: return "los";
    case ProximityKind::gravity: return "gravity";
    case ProximityKind::skill: return "skill";
  }
  return "unknown";
}

ProximityKind parse_proximity_kind(const std::string& text) {
  for (ProximityKind k : {ProximityKind::leontief, ProximityKind::rd_flows, ProximityKind::los,
                          ProximityKind::gravity, ProximityKind::skill})
    if (to_string(k) == text) return k;
  throw UsageError("unknown proximity kind '" + text + "'");
}

namespace {

void check_vector(const Eigen::VectorXd& v, std::size_t n, const char* name) {
  if (static_cast<std::size_t>(v.size()) != n)
    throw DataError(std::string("io table: vector ") + name + " has length " +
                    std::to_string(v.size()) + ", expected " + std::to_string(n));
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i]))
      throw DataError(std::string("io table: vector ") + name + " has a non-finite entry");
}

void require_productive(const Eigen::MatrixXd& a) {
  const SpectralRadius rho = spectral_radius(a);
  if (rho.upper >= 1.0) {
    std::ostringstream msg;
    msg << "input coefficient matrix is not productive: spectral radius " << rho.value
        << " (upper bound " << rho.upper << ") must be below 1";
    throw NumericError(msg.str());
  }
}

}  // namespace

void IoTable::validate() const {
  const std::size_t n = size();
  if (static_cast<std::size_t>(a.rows()) != n || static_cast<std::size_t>(a.cols()) != n)
    throw DataError("io table: A is " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                    " but there are " + std::to_string(n) + " sectors");
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index k = 0; k < a.cols(); ++k)
      if (!std::isfinite(a(i, k)) || a(i, k) < 0.0)
        throw DataError("io table: A(" + sector_ids[i] + "," + sector_ids[k] +
                        ") is negative or not finite");
  check_vector(x, n, "x");
  check_vector(y, n, "y");
  check_vector(r, n, "r");
  check_vector(q, n, "q");
  if (value_added.size() != 0) check_vector(value_added, n, "value_added");
  require_productive(a);
}

Eigen::MatrixXd leontief(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw DataError("leontief: A must be square");
  require_productive(a);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  return (id - a).partialPivLu().solve(id);
}

ProximityMatrix leontief(const IoTable& table, bool drop_diagonal) {
  ProximityMatrix p{ProximityKind::leontief, table.sector_ids, leontief(table.a)};
  if (drop_diagonal) p.values.diagonal().setZero();
  return p;
}

ProximityMatrix rd_flows(const IoTable& table) {
  for (std::size_t i = 0; i < table.size(); ++i)
    if (!(table.q[static_cast<Eigen::Index>(i)] > 0.0))
      throw DataError("rd_flows: output q of sector " + table.sector_ids[i] +
                      " must be positive");
  const Eigen::VectorXd intensity = table.r.array() / table.q.array();
  const Eigen::MatrixXd l = leontief(table.a);
  return {ProximityKind::rd_flows, table.sector_ids,
          intensity.asDiagonal() * l * table.y.asDiagonal()};
}

Eigen::MatrixXd los_index(const Eigen::MatrixXd& a, LosOrientation orientation) {
  const Eigen::MatrixXd v = orientation == LosOrientation::rows ? a : Eigen::MatrixXd(a.transpose());
  const Eigen::Index n = v.rows();
  const Eigen::VectorXd norms = v.rowwise().norm();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (norms[i] <= 0.0) continue;
    out(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (norms[j] <= 0.0) continue;
      const double c = std::clamp(v.row(i).dot(v.row(j)) / (norms[i] * norms[j]), 0.0, 1.0);
      out(i, j) = c;
      out(j, i) = c;
    }
  }
  return out;
}

Eigen::MatrixXd gravity(const Eigen::VectorXd& value_added, double g) {
  const double total = value_added.sum();
  if (!(total > 0.0)) throw DataError("gravity: total value added must be positive");
  return g * value_added * value_added.transpose() / (total * total);
}

MappedProximity apply_mapping(const ProximityMatrix& p, const SectorMapping& mapping) {
  MappedProximity out;
  std::map<std::string, std::size_t> sector_index;
  for (std::size_t s = 0; s < p.ids.size(); ++s) sector_index[p.ids[s]] = s;

  std::vector<std::string> nodes;
  std::map<std::string, std::size_t> node_index;
  std::set<std::string> mapped;
  struct Link {
    std::size_t sector;
    std::size_t node;
    double weight;
  };
  std::vector<Link> links;
  for (const auto& e : mapping.entries) {
    auto it = sector_index.find(e.sector);
    if (it == sector_index.end()) {
      out.warnings.push_back("mapping names sector '" + e.sector + "' absent from the table");
      continue;
    }
    if (!mapped.insert(e.sector).second)
      throw DataError("mapping lists sector '" + e.sector + "' more than once");
    if (!std::isfinite(e.weight) || e.weight < 0.0)
      throw DataError("mapping weight for sector '" + e.sector + "' is negative or not finite");
    auto [nit, fresh] = node_index.try_emplace(e.node, nodes.size());
    if (fresh) nodes.push_back(e.node);
    links.push_back({it->second, nit->second, e.weight});
  }
  std::vector<std::string> dropped;
  for (const std::string& id : p.ids)
    if (!mapped.contains(id)) dropped.push_back(id);
  if (!dropped.empty()) {
    std::string msg = "unmapped sectors dropped:";
    for (const auto& d : dropped) msg += " " + d;
    out.warnings.push_back(msg);
  }

  Eigen::MatrixXd bridge =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p.ids.size()), static_cast<Eigen::Index>(nodes.size()));
  for (const Link& l : links)
    bridge(static_cast<Eigen::Index>(l.sector), static_cast<Eigen::Index>(l.node)) = l.weight;
  out.matrix.kind = p.kind;
  out.matrix.ids = nodes;
  out.matrix.values = bridge.transpose() * p.values * bridge;
  return out;
}

}  // namespace innoflow::econ
