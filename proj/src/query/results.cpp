#include "probkg/query/results.hpp"

#include "json.hpp"

namespace probkg::query {

std::vector<Answer> distinct_answers(const ResultSet& rs) {
  std::vector<Answer> out;
  std::vector<std::vector<prov::Lineage>> parts;
  for (const auto& r : rs.rows) {
    if (out.empty() || out.back().vals != r.vals) {
      out.push_back({r.vals, nullptr, std::nullopt});
      parts.emplace_back();
    }
    if (r.lineage) parts.back().push_back(r.lineage);
  }
  for (std::size_t i = 0; i < out.size(); ++i)
    if (!parts[i].empty()) out[i].lineage = prov::plus(std::move(parts[i]));
  return out;
}

std::string answer_key(const std::vector<std::string>& vars, const std::vector<kg::TermId>& vals,
                       const TermTable& terms) {
  std::string key;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    key += vars[i];
    key += '=';
    if (vals[i] != kg::kNoTerm) key += kg::term_key(terms.term(vals[i]));
    key += '\n';
  }
  return key;
}

std::string to_json_line(const std::vector<std::string>& vars, const Answer& a, const TermTable& terms) {
  nlohmann::ordered_json j;
  j["bindings"] = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (a.vals[i] != kg::kNoTerm) j["bindings"][vars[i]] = kg::display_value(terms.term(a.vals[i]));
  if (a.probability) j["probability"] = *a.probability;
  return j.dump();
}

}  // namespace probkg::query
