#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "innoflow/netcore.hpp"

namespace innoflow {

using BoolMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// A predictor's score for every ordered node pair. Only eligible entries
/// are ever ranked.
struct ScoreMatrix {
  std::string predictor;
  Eigen::MatrixXd scores;
  BoolMatrix eligible;

  std::size_t size() const { return static_cast<std::size_t>(scores.rows()); }
  std::size_t eligible_count() const { return static_cast<std::size_t>(eligible.count()); }
  std::vector<EdgePair> eligible_pairs() const;
};

/// Mask with exactly the listed pairs set. Throws DataError on duplicates or
/// out-of-range pairs.
BoolMatrix pair_mask(std::size_t n, const std::vector<EdgePair>& pairs);

/// Mask of (eligible source, any target) pairs.
BoolMatrix source_mask(const NodeUniverse& nodes);

}  // namespace innoflow
