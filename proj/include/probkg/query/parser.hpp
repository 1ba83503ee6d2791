#pragma once

#include <string_view>

#include "probkg/query/ast.hpp"

namespace probkg::query {

/// Throws Syntax (with line and column) or UnboundVariable.
QueryAst parse_query(std::string_view text);

/// Parses a standalone expression (no scope check).
ExprPtr parse_expression(std::string_view text);

}  // namespace probkg::query
