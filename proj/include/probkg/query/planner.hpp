#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "probkg/query/ast.hpp"

namespace probkg::query {

struct PlanOptions {
  bool pushdown = true;
  /// Fixed SIMJOIN bounding grid; empty means a per-pair equal-probability grid.
  std::vector<double> simjoin_grid;
  std::size_t simjoin_bins = 32;
  /// Disables the bound check so every candidate pair is integrated.
  bool simjoin_prune = true;
};

struct PlanNode;
using PlanNodePtr = std::shared_ptr<PlanNode>;

struct PlanNode {
  enum class Op { Unit, IndexScan, Join, Filter, Bind, Union, LeftJoin, Minus, SimJoin };
  Op op = Op::Unit;
  kg::TriplePattern pattern;  // IndexScan
  std::vector<PlanNodePtr> children;
  ExprPtr expr;  // Filter, Bind
  std::string var;
  std::string var_a, var_b;
  double theta = 0.0;
  double estimate = 1.0;
  std::set<std::string> certain;
};

struct Plan {
  std::vector<std::string> select;
  PlanNodePtr root;
  /// One line per filter relocation.
  std::vector<std::string> trace;
  PlanOptions options;
};

/// Single-pattern cardinalities are exact index counts; joins assume
/// independent columns.
Plan plan(const QueryAst& ast, const kg::Graph& g, const PlanOptions& opts = {});

/// Indented operator tree with estimates, followed by the pushdown trace.
std::string explain(const Plan& p);

std::string_view op_name(PlanNode::Op op) noexcept;

}  // namespace probkg::query
