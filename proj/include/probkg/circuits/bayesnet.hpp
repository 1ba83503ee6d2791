#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "probkg/circuits/ddnnf.hpp"
#include "probkg/circuits/formula.hpp"
#include "probkg/kg/graph.hpp"

namespace probkg::circuits {

/// Boolean node. Row r of the CPT holds {P(false), P(true)} for the parent
/// assignment whose bit j is the value of parents[j].
struct BnNode {
  std::string name;
  std::vector<std::size_t> parents;
  std::vector<std::array<double, 2>> cpt;
  /// Graph triple whose existence this node models.
  std::optional<kg::TripleId> triple;
};

struct BayesNet {
  std::vector<BnNode> nodes;
};

/// Throws CyclicNetwork or MalformedCpt.
void validate(const BayesNet& bn);
/// Also checks that every bound triple exists in `g`.
void validate(const BayesNet& bn, const kg::Graph& g);
/// Parents before children; ties by index.
std::vector<std::size_t> topo_order(const BayesNet& bn);

/// `{"nodes":[{"name":"A","parents":["B"],"cpt":[[0.9,0.1],[0.2,0.8]],"triple":3}]}`;
/// parents are referenced by name.
BayesNet parse_bayesnet(std::string_view json_text);

/// Clause form over variables 1..num_vars; literal v > 0 is positive.
struct Cnf {
  Var num_vars = 0;
  std::vector<std::vector<int>> clauses;
  Weights weights;
};

struct BnEncoding {
  Cnf cnf;
  /// Indicator variables lambda(X = false) and lambda(X = true) per node.
  std::vector<std::array<Var, 2>> indicator;
};

/// Indicator and parameter encoding. Variables are numbered from `base`;
/// indicators weigh (1, 1), parameters (theta, 1).
BnEncoding bn_to_cnf(const BayesNet& bn, Var base = 1);

BoolFormula cnf_to_formula(const Cnf& cnf);

/// P(evidence) by compiling the encoding with the evidence literals asserted.
double bn_probability(const BayesNet& bn, const std::map<std::size_t, bool>& evidence);

}  // namespace probkg::circuits
