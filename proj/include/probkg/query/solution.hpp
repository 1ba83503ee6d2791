#pragma once

#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "probkg/kg/graph.hpp"
#include "probkg/prov/lineage.hpp"

namespace probkg::query {

using VarId = std::uint32_t;

/// Dense numbering of the variables of one query.
class VarTable {
 public:
  VarId add(const std::string& name);
  std::optional<VarId> find(const std::string& name) const;
  const std::string& name(VarId id) const { return names_[id]; }
  std::size_t size() const noexcept { return names_.size(); }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, VarId> ids_;
};

/// Graph terms plus terms created during evaluation (BIND results). Ids below
/// graph().term_count() are graph ids; equal terms always share one id.
class TermTable {
 public:
  explicit TermTable(const kg::Graph& g) : g_(&g) {}

  kg::TermId intern(const kg::Term& t);
  const kg::Term& term(kg::TermId id) const;
  /// NaN unless numeric.
  double numeric(kg::TermId id) const;
  std::shared_ptr<const dist::Distribution> distribution(kg::TermId id) const;
  /// Graph::packed_gmm for graph terms, empty otherwise.
  std::span<const double> packed_gmm(kg::TermId id) const;
  /// Total order consistent with the sorted N-Triples key order.
  int compare(kg::TermId a, kg::TermId b) const;
  const kg::Graph& graph() const { return *g_; }

 private:
  const kg::Graph* g_;
  std::vector<kg::Term> extra_;
  std::vector<std::string> extra_keys_;
  std::unordered_map<std::string, kg::TermId> extra_ids_;
};

/// One solution mapping: a value slot per query variable (kNoTerm when
/// unbound) and its lineage (null when lineage is not tracked).
struct Row {
  std::vector<kg::TermId> vals;
  prov::Lineage lineage;
};

/// Bound values agree wherever both rows bind a variable.
inline bool compatible(const Row& a, const Row& b) {
  for (std::size_t i = 0; i < a.vals.size(); ++i)
    if (a.vals[i] != kg::kNoTerm && b.vals[i] != kg::kNoTerm && a.vals[i] != b.vals[i]) return false;
  return true;
}

/// Union of the bindings; lineage is the product when tracked.
inline Row merge(const Row& a, const Row& b) {
  Row r{a.vals, nullptr};
  for (std::size_t i = 0; i < r.vals.size(); ++i)
    if (r.vals[i] == kg::kNoTerm) r.vals[i] = b.vals[i];
  if (a.lineage && b.lineage) r.lineage = prov::times({a.lineage, b.lineage});
  return r;
}

}  // namespace probkg::query
