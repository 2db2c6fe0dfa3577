#pragma once

// Proximity matrices from input-output data.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "innoflow/linalg.hpp"

namespace innoflow::econ {

enum class ProximityKind { leontief, rd_flows, los, gravity, skill };

std::string to_string(ProximityKind kind);
ProximityKind parse_proximity_kind(const std::string& text);

struct ProximityMatrix {
  ProximityKind kind = ProximityKind::leontief;
  std::vector<std::string> ids;
  Eigen::MatrixXd values;
};

/// Input-output table. `a(i, k)` is the input from sector k per unit of
/// output of sector i; all vectors are indexed like `sector_ids`.
struct IoTable {
  std::vector<std::string> sector_ids;
  Eigen::MatrixXd a;
  Eigen::VectorXd x;  // output
  Eigen::VectorXd y;  // final demand
  Eigen::VectorXd r;  // R&D expenditure
  Eigen::VectorXd q;  // output used as the R&D intensity denominator
  Eigen::VectorXd value_added;  // optional, empty when absent

  std::size_t size() const { return sector_ids.size(); }
  /// Checks conformability, A >= 0 and rho(A) < 1; throws DataError or
  /// NumericError naming the offending cell or the radius.
  void validate() const;
};

/// (I - A)^-1. Throws NumericError reporting rho(A) when rho(A) >= 1.
Eigen::MatrixXd leontief(const Eigen::MatrixXd& a);
ProximityMatrix leontief(const IoTable& table, bool drop_diagonal = false);

/// diag(r) diag(q)^-1 (I - A)^-1 diag(y). Throws DataError naming a sector
/// with q = 0.
ProximityMatrix rd_flows(const IoTable& table);

enum class LosOrientation { rows, columns };

/// Cosine similarity of input-coefficient vectors; `rows` compares
/// (a_ik)_k. Zero vectors give 0, nonzero rows a unit diagonal.
Eigen::MatrixXd los_index(const Eigen::MatrixXd& a, LosOrientation orientation = LosOrientation::rows);

/// F_ij = g m_i m_j / (sum m)^2. Throws DataError if sum m <= 0.
Eigen::MatrixXd gravity(const Eigen::VectorXd& value_added, double g = 1.0);

/// Many-to-one bridge from IO sectors to network nodes: each sector maps to
/// at most one node with a weight. Unlisted sectors are dropped.
struct SectorMapping {
  struct Entry {
    std::string sector;
    std::string node;
    double weight = 1.0;
  };
  std::vector<Entry> entries;
};

struct MappedProximity {
  ProximityMatrix matrix;
  std::vector<std::string> warnings;
};

/// P_node(a, b) = sum over sectors s -> a, t -> b of w_s w_t P(s, t).
/// Node order follows first appearance in the mapping.
MappedProximity apply_mapping(const ProximityMatrix& p, const SectorMapping& mapping);

}  // namespace innoflow::econ
