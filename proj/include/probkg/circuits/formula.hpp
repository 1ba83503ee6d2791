#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace probkg::circuits {

using Var = std::uint32_t;

struct Formula;
/// Immutable Boolean formula in negation normal form. Nodes may be shared.
using BoolFormula = std::shared_ptr<const Formula>;

struct Formula {
  enum class Kind { False, True, Lit, And, Or };
  Kind kind = Kind::False;
  Var var = 0;
  bool positive = true;
  std::vector<BoolFormula> children;
};

BoolFormula f_false();
BoolFormula f_true();
BoolFormula f_lit(Var v, bool positive = true);
/// Flattens nested connectives of the same kind and folds constants.
BoolFormula f_and(std::vector<BoolFormula> children);
BoolFormula f_or(std::vector<BoolFormula> children);
/// Negation pushed to the literals.
BoolFormula f_not(const BoolFormula& f);

/// Sorted distinct variables.
std::vector<Var> variables(const BoolFormula& f);
bool evaluate(const BoolFormula& f, const std::function<bool(Var)>& value);
/// True when no negated connective appears above a literal. Always holds for
/// formulas built through this interface; kept as an explicit check.
bool is_nnf(const BoolFormula& f);
bool is_monotone(const BoolFormula& f);
std::size_t node_count(const BoolFormula& f);

/// Infix form: `x1 & !x2 | (x3 & x4)`, constants `T` and `F`.
std::string to_string(const BoolFormula& f);
/// Parses the infix form. `!` binds tightest, then `&`, then `|`. Negation of
/// a parenthesised group is pushed inward.
BoolFormula parse_formula(std::string_view text);

}  // namespace probkg::circuits
