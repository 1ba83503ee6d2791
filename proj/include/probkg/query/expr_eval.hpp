#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "probkg/mc/sampler.hpp"
#include "probkg/query/ast.hpp"
#include "probkg/query/solution.hpp"

namespace probkg::query {

struct Value {
  enum class Kind { Error, Number, Bool, Dist, Term };
  Kind kind = Kind::Error;
  double num = 0.0;
  bool b = false;
  std::shared_ptr<const dist::Distribution> dist;
  kg::TermId term = kg::kNoTerm;
  std::string error;

  static Value number(double v) { return {Kind::Number, v, false, nullptr, kg::kNoTerm, {}}; }
  static Value boolean(bool v) { return {Kind::Bool, 0.0, v, nullptr, kg::kNoTerm, {}}; }
  static Value fault(std::string why) { return {Kind::Error, 0.0, false, nullptr, kg::kNoTerm, std::move(why)}; }
};

/// Expression with variables resolved to slots and constants pre-converted.
struct CompiledExpr {
  Expr::Kind kind = Expr::Kind::Const;
  VarId var = 0;
  Value constant;
  std::string op;
  Builtin builtin = Builtin::Pgt;
  std::vector<CompiledExpr> args;
};

CompiledExpr compile_expr(const ExprPtr& e, const VarTable& vars, TermTable& terms);

/// Optional sampling substitute for PGT: `PGT(d, c) >= theta` style
/// comparisons against a constant threshold are decided by mc_threshold.
struct SamplingMode {
  mc::SamplerConfig config;
};

struct ExprContext {
  const TermTable* terms = nullptr;
  const SamplingMode* sampling = nullptr;
};

Value eval_expr(const CompiledExpr& e, const Row& row, const ExprContext& ctx);

/// Value of a term as an expression operand.
Value term_value(kg::TermId id, const TermTable& terms);

/// Effective boolean value; nullopt on error.
std::optional<bool> truth(const Value& v);

/// Term for a BIND result; nullopt for errors.
std::optional<kg::TermId> to_term(const Value& v, TermTable& terms);

}  // namespace probkg::query
