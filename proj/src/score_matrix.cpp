#include "innoflow/score_matrix.hpp"

#include "innoflow/error.hpp"

namespace innoflow {

std::vector<EdgePair> ScoreMatrix::eligible_pairs() const {
  std::vector<EdgePair> out;
  for (Eigen::Index i = 0; i < eligible.rows(); ++i)
    for (Eigen::Index j = 0; j < eligible.cols(); ++j)
      if (eligible(i, j))
        out.push_back({static_cast<NodeIndex>(i), static_cast<NodeIndex>(j)});
  return out;
}

BoolMatrix pair_mask(std::size_t n, const std::vector<EdgePair>& pairs) {
  const auto m = static_cast<Eigen::Index>(n);
  BoolMatrix mask = BoolMatrix::Constant(m, m, false);
  for (const EdgePair& p : pairs) {
    if (p.source >= n || p.target >= n) throw DataError("edge universe pair outside the node set");
    if (mask(p.source, p.target))
      throw DataError("edge universe lists the pair (" + std::to_string(p.source) + "," +
                      std::to_string(p.target) + ") twice");
    mask(p.source, p.target) = true;
  }
  return mask;
}

BoolMatrix source_mask(const NodeUniverse& nodes) {
  const auto m = static_cast<Eigen::Index>(nodes.size());
  BoolMatrix mask = BoolMatrix::Constant(m, m, false);
  for (NodeIndex i : nodes.eligible_sources()) mask.row(static_cast<Eigen::Index>(i)).setConstant(true);
  return mask;
}

}  // namespace innoflow
