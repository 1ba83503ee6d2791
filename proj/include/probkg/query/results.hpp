#pragma once

#include <optional>
#include <string>
#include <vector>

#include "probkg/query/evaluator.hpp"

namespace probkg::query {

/// One distinct binding tuple with the Plus of its duplicates' lineages.
struct Answer {
  std::vector<kg::TermId> vals;
  prov::Lineage lineage;
  std::optional<double> probability;
};

/// Collapses equal binding tuples (rows must be sorted, as evaluate returns them).
std::vector<Answer> distinct_answers(const ResultSet& rs);

/// Binding map key for comparisons: variable=term pairs in select order.
std::string answer_key(const std::vector<std::string>& vars, const std::vector<kg::TermId>& vals,
                       const TermTable& terms);

/// `{"bindings":{"x":"<urn:a>"},"probability":0.12}`; unbound variables are
/// omitted and the probability only when present.
std::string to_json_line(const std::vector<std::string>& vars, const Answer& a, const TermTable& terms);

}  // namespace probkg::query
