#pragma once

#include <map>
#include <string>
#include <vector>

#include "probkg/kg/graph.hpp"
#include "probkg/query/ast.hpp"

namespace probkg::circuits {

struct SafeNode {
  enum class Kind { IndependentJoin, IndependentProject, PatternLeaf };
  Kind kind = Kind::PatternLeaf;
  std::string var;              // IndependentProject
  kg::TriplePattern pattern;    // PatternLeaf
  std::vector<SafeNode> children;
};

struct SafePlan {
  bool safe = false;
  /// Why the query was not classified safe ("UnsupportedShape: ..." or
  /// "NotHierarchical: ...").
  std::string reason;
  std::vector<std::string> head;
  SafeNode root;
};

/// Classifies self-join-free conjunctive queries (a single BGP whose
/// patterns carry distinct constant predicates). Existential variables must
/// be hierarchical: the pattern sets of any two are nested or disjoint.
SafePlan safe_plan(const query::QueryAst& ast);

std::string to_string(const SafeNode& n);

/// Per-answer probabilities (keyed by head term ids). `probs`, if given,
/// overrides the existence probability of every triple.
/// Probability of one head tuple (graph term ids in head order).
double lifted_probability(const SafePlan& plan, const kg::Graph& g, const std::vector<kg::TermId>& head_vals,
                          const std::vector<double>* probs = nullptr);

std::map<std::vector<kg::TermId>, double> lifted_eval(const SafePlan& plan, const kg::Graph& g,
                                                      const std::vector<double>* probs = nullptr);

}  // namespace probkg::circuits
