#pragma once

#include <cstddef>
#include <vector>

#include "probkg/query/solution.hpp"

namespace probkg::query {

struct SimJoinStats {
  std::size_t candidates = 0;
  std::size_t pruned = 0;
  /// Candidates that passed the bound and were integrated.
  std::size_t survivors = 0;
  std::size_t matches = 0;
  std::size_t warnings = 0;

  double pruned_fraction() const {
    return candidates ? static_cast<double>(pruned) / static_cast<double>(candidates) : 0.0;
  }
};

struct SimJoinConfig {
  VarId var_a = 0;
  VarId var_b = 0;
  double theta = 0.0;
  /// Empty: per-pair equal-probability grid with `bins` cells.
  std::vector<double> grid;
  std::size_t bins = 32;
  bool prune = true;
};

/// Joins compatible left/right mappings and keeps those whose two
/// distributions are within theta in Jensen-Shannon divergence. Pairs whose
/// coarsened lower bound already exceeds theta are pruned unintegrated.
std::vector<Row> eval_simjoin(const std::vector<Row>& left, const std::vector<Row>& right,
                              const SimJoinConfig& cfg, const TermTable& terms, SimJoinStats& stats);

}  // namespace probkg::query
