#include "probkg/query/simjoin.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "probkg/dist/measures.hpp"
#include "probkg/simd/kernels.hpp"
#include "probkg/util/error.hpp"
#include "probkg/util/parallel.hpp"

namespace probkg::query {

namespace {

enum class Outcome : std::uint8_t { Pruned, Rejected, Kept, Failed };

// Masses of a distribution on the join-wide grid; empty when it cannot be
// coarsened (such pairs go straight to the per-pair checks).
using Coarse = std::vector<double>;

bool coarse_prunes(const Coarse& a, const Coarse& b, double theta) {
  if (a.empty() || b.empty()) return false;
  return std::clamp(simd::hist_jsd(a, b), 0.0, std::numbers::ln2) > theta;
}

Outcome decide(const dist::Distribution& a, const dist::Distribution& b, const Coarse& ca, const Coarse& cb,
               const SimJoinConfig& cfg) {
  try {
    if (cfg.prune) {
      if (coarse_prunes(ca, cb, cfg.theta)) return Outcome::Pruned;
      if (cfg.grid.empty()) {
        const auto grid = dist::equal_probability_grid(a, b, cfg.bins);
        if (grid.size() >= 2 && dist::jsd_lower_bound(a, b, grid) > cfg.theta) return Outcome::Pruned;
      }
    }
    return dist::jsd_auto(a, b) <= cfg.theta ? Outcome::Kept : Outcome::Rejected;
  } catch (const Error&) {
    return Outcome::Failed;
  }
}

// Without a configured grid: equal-width cells over the pooled support of
// every distribution in the join. Coarsening happens once per term, so this
// first bound costs one histogram divergence per pair.
std::vector<double> shared_grid(const std::vector<kg::TermId>& ids, const TermTable& terms, std::size_t cells) {
  double lo = INFINITY, hi = -INFINITY;
  for (kg::TermId id : ids) {
    try {
      const auto [l, h] = dist::support(*terms.distribution(id));
      lo = std::min(lo, l);
      hi = std::max(hi, h);
    } catch (const Error&) {
    }
  }
  std::vector<double> grid;
  if (!(lo < hi)) return grid;
  for (std::size_t i = 0; i <= cells; ++i)
    grid.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(cells));
  return grid;
}

}  // namespace

std::vector<Row> eval_simjoin(const std::vector<Row>& left, const std::vector<Row>& right,
                              const SimJoinConfig& cfg, const TermTable& terms, SimJoinStats& stats) {
  std::vector<Row> merged;
  for (const auto& l : left)
    for (const auto& r : right)
      if (compatible(l, r)) merged.push_back(merge(l, r));

  // Distinct (a, b) term pairs are decided once.
  std::map<std::pair<kg::TermId, kg::TermId>, std::size_t> pair_index;
  std::vector<std::pair<kg::TermId, kg::TermId>> pairs;
  std::vector<std::size_t> row_pair(merged.size(), SIZE_MAX);
  for (std::size_t i = 0; i < merged.size(); ++i) {
    const kg::TermId a = merged[i].vals[cfg.var_a];
    const kg::TermId b = merged[i].vals[cfg.var_b];
    if (a == kg::kNoTerm || b == kg::kNoTerm || !terms.distribution(a) || !terms.distribution(b)) {
      ++stats.warnings;
      continue;
    }
    auto [it, fresh] = pair_index.emplace(std::make_pair(a, b), pairs.size());
    if (fresh) pairs.emplace_back(a, b);
    row_pair[i] = it->second;
  }

  std::vector<kg::TermId> ids;
  for (const auto& [a, b] : pairs) {
    ids.push_back(a);
    ids.push_back(b);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::vector<Coarse> coarse(ids.size());
  if (cfg.prune) {
    const auto grid = cfg.grid.empty() ? shared_grid(ids, terms, 4 * cfg.bins) : cfg.grid;
    if (grid.size() >= 2)
      parallel_chunks(ids.size(), thread_count(), [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
          try {
            coarse[k] = dist::coarsen(*terms.distribution(ids[k]), grid).masses;
          } catch (const Error&) {
          }
        }
      });
  }
  auto coarse_of = [&](kg::TermId id) -> const Coarse& {
    return coarse[std::lower_bound(ids.begin(), ids.end(), id) - ids.begin()];
  };

  std::vector<Outcome> outcome(pairs.size());
  parallel_chunks(pairs.size(), thread_count(), [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const auto [a, b] = pairs[k];
      outcome[k] = decide(*terms.distribution(a), *terms.distribution(b), coarse_of(a), coarse_of(b), cfg);
    }
  });

  std::vector<Row> out;
  for (std::size_t i = 0; i < merged.size(); ++i) {
    if (row_pair[i] == SIZE_MAX) continue;
    ++stats.candidates;
    switch (outcome[row_pair[i]]) {
      case Outcome::Pruned: ++stats.pruned; break;
      case Outcome::Failed: ++stats.warnings; break;
      case Outcome::Rejected: ++stats.survivors; break;
      case Outcome::Kept:
        ++stats.survivors;
        ++stats.matches;
        out.push_back(std::move(merged[i]));
        break;
    }
  }
  return out;
}

}  // namespace probkg::query
