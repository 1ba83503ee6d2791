#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "probkg/circuits/formula.hpp"

namespace probkg::circuits {

using NodeId = std::uint32_t;

struct DNode {
  enum class Kind { False, True, Leaf, And, Or };
  Kind kind = Kind::False;
  /// Leaf: the literal. Or: the decision variable.
  Var var = 0;
  bool positive = true;
  /// And: operands. Or: {hi, lo}, conditioned on var and on !var.
  std::vector<NodeId> children;
};

/// Circuit as a topologically ordered node array: children precede parents.
struct DDnnf {
  std::vector<DNode> nodes;
  NodeId root = 0;
  std::size_t size() const noexcept { return nodes.size(); }
};

struct LitWeight {
  double pos = 1.0;
  double neg = 1.0;
};
/// The universe of the count is the key set.
using Weights = std::map<Var, LitWeight>;

/// Bottom-up weighted model count over the variables of `weights`. Branches
/// that do not mention a variable are smoothed by (pos + neg).
double wmc(const DDnnf& c, const Weights& weights);

/// Sorted variables mentioned by the circuit.
std::vector<Var> circuit_variables(const DDnnf& c);
bool circuit_evaluate(const DDnnf& c, const std::function<bool(Var)>& value);

struct VerifyReport {
  bool ok = true;
  std::string violation;
  std::optional<NodeId> node;
};

/// Checks topological order, decomposability of every And node and that both
/// branches of every Or node carry the opposite phases of its decision variable.
VerifyReport verify_circuit(const DDnnf& c);

/// Node-per-line text form:
///   ddnnf <node count> <root>
///   <id> F | <id> T | <id> L <signed literal> | <id> A <child>... | <id> O <var> <hi> <lo>
/// Literals are written as +v / -v.
std::string export_circuit(const DDnnf& c);
DDnnf import_circuit(std::string_view text);

}  // namespace probkg::circuits
