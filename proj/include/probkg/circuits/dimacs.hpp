#pragma once

#include <string>
#include <string_view>

#include "probkg/circuits/bayesnet.hpp"

namespace probkg::circuits {

/// DIMACS CNF with weight comment lines `c w <var> <w_pos> <w_neg>`.
/// Unweighted variables default to (1, 1) when read.
Cnf read_dimacs(std::string_view text);
std::string write_dimacs(const Cnf& cnf);

}  // namespace probkg::circuits
