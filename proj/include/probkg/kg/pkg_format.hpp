#pragma once

#include <string>
#include <string_view>

#include "probkg/kg/graph.hpp"

namespace probkg::kg {

/// Parses the line-oriented `.pkg` format:
///   <subject> <predicate> <object-or-literal> [@probability] .
/// Lines starting with '#' and blank lines are skipped.
Graph parse_graph_file(std::string_view text);

/// Reads and parses a `.pkg` file; Io error when it cannot be read.
Graph load_graph_file(const std::string& path);

/// One statement per triple in id order; `@p` only when p < 1.
std::string serialize_graph(const Graph& g);

/// Parses a single term in `.pkg` syntax (used by the query parser for
/// constants as well). Throws LineParse on malformed input.
Term parse_term(std::string_view text);

}  // namespace probkg::kg
