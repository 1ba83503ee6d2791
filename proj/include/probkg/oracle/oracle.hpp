#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "probkg/circuits/bayesnet.hpp"
#include "probkg/dist/distribution.hpp"
#include "probkg/kg/graph.hpp"
#include "probkg/query/ast.hpp"

namespace probkg::oracle {

struct WorldAnswer {
  /// Display values in select order; empty when unbound.
  std::vector<std::string> bindings;
  double probability = 0.0;
};

struct WorldReport {
  std::vector<std::string> vars;
  /// Keyed by query::answer_key.
  std::map<std::string, WorldAnswer> answers;
  std::uint64_t worlds_evaluated = 0;
  /// Sum of all world weights; 1 up to rounding.
  double total_weight = 0.0;
};

inline constexpr std::size_t kMaxUncertain = 20;

/// Evaluates the query deterministically in every subset of the uncertain
/// triples and sums the world weights per distinct answer. Throws
/// TooManyWorlds above kMaxUncertain uncertain triples.
WorldReport enumerate_worlds(const kg::Graph& g, const query::QueryAst& ast);

/// As enumerate_worlds, but triples bound to network nodes follow the
/// network's joint distribution instead of their own probabilities.
WorldReport enumerate_worlds(const kg::Graph& g, const query::QueryAst& ast, const circuits::BayesNet& bn);

/// Jensen-Shannon divergence of two 1-d distributions by adaptive
/// Gauss-Kronrod quadrature over the joint 10-sigma envelope.
double quad_jsd(const dist::Distribution& a, const dist::Distribution& b);

/// Product of CPT entries; the assignment must cover every node.
double bn_joint(const circuits::BayesNet& bn, const std::map<std::size_t, bool>& assignment);

}  // namespace probkg::oracle
