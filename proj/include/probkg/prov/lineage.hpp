#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "probkg/circuits/formula.hpp"

namespace probkg::prov {

struct LineageNode;
/// Immutable spm-semiring provenance expression over triple variables.
using Lineage = std::shared_ptr<const LineageNode>;

struct LineageNode {
  enum class Kind { Var, Zero, One, Plus, Times, Monus };
  Kind kind = Kind::Zero;
  std::uint32_t triple = 0;
  /// Plus/Times: two or more operands. Monus: {left, right}.
  std::vector<Lineage> children;
};

Lineage var(std::uint32_t triple);
Lineage zero();
Lineage one();
/// Flattening builders; Zero and One operands are folded and a single
/// operand is returned unchanged.
Lineage plus(std::vector<Lineage> xs);
Lineage times(std::vector<Lineage> xs);
Lineage monus(Lineage left, Lineage right);

bool has_monus(const Lineage& l);
/// Sorted distinct triple ids.
std::vector<std::uint32_t> triples_of(const Lineage& l);

/// Boolean image: Var is a positive literal on the triple id, Plus is Or,
/// Times is And, Monus(a, b) is a AND NOT b.
circuits::BoolFormula to_boolean(const Lineage& l);

/// `(x1 * x2) + (x3 - x4)`, with `0` and `1` for the constants.
std::string to_string(const Lineage& l);

}  // namespace probkg::prov
