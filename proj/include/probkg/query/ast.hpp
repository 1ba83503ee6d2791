#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "probkg/kg/graph.hpp"

namespace probkg::query {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class Builtin { Pgt, Pbetween, Cdf, Jsd, Conv, Fuse, Mean, Var };

struct Expr {
  enum class Kind { Var, Const, Not, Neg, Binary, Call };
  Kind kind = Kind::Const;
  std::string name;  // variable name
  kg::Term constant;
  std::string op;  // Binary: + - * / < <= > >= = != && ||
  Builtin builtin = Builtin::Pgt;
  std::vector<ExprPtr> args;
};

struct Pattern;
using PatternPtr = std::shared_ptr<const Pattern>;

struct Pattern {
  enum class Kind { Bgp, Join, Union, Optional, Minus, Filter, Bind, SimJoin };
  Kind kind = Kind::Bgp;
  std::vector<kg::TriplePattern> triples;  // Bgp
  PatternPtr left;                         // Join/Union/Optional/Minus/SimJoin, or the input of Filter/Bind
  PatternPtr right;
  ExprPtr expr;          // Filter condition, Bind expression
  std::string var;       // Bind target
  std::string var_a;     // SimJoin
  std::string var_b;
  double theta = 0.0;
};

struct QueryAst {
  std::vector<std::string> select;
  PatternPtr where;
};

PatternPtr make_bgp(std::vector<kg::TriplePattern> triples);
PatternPtr make_binary(Pattern::Kind kind, PatternPtr left, PatternPtr right);
PatternPtr make_filter(PatternPtr input, ExprPtr cond);
PatternPtr make_bind(PatternPtr input, ExprPtr e, std::string var);
PatternPtr make_simjoin(PatternPtr left, PatternPtr right, std::string a, std::string b, double theta);

ExprPtr make_var(std::string name);
ExprPtr make_const(kg::Term t);
ExprPtr make_call(Builtin b, std::vector<ExprPtr> args);
ExprPtr make_binary_expr(std::string op, ExprPtr a, ExprPtr b);

std::string_view builtin_name(Builtin b) noexcept;
/// Number of arguments the builtin takes.
std::size_t builtin_arity(Builtin b) noexcept;

std::set<std::string> expr_vars(const ExprPtr& e);
/// Variables bound in every solution of the pattern.
std::set<std::string> certain_vars(const PatternPtr& p);
/// Variables bound in some solution of the pattern.
std::set<std::string> possible_vars(const PatternPtr& p);
std::vector<std::string> pattern_vars(const kg::TriplePattern& tp);

/// Query text that parses back to an equal tree.
std::string to_string(const QueryAst& q);
std::string to_string(const ExprPtr& e);
std::string to_string(const kg::PatternSlot& s);

/// Splits a conjunction into its `&&` operands.
std::vector<ExprPtr> conjuncts(const ExprPtr& e);

}  // namespace probkg::query
