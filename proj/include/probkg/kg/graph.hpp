#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "probkg/kg/term.hpp"

namespace probkg::kg {

using TermId = std::uint32_t;
using TripleId = std::uint32_t;
inline constexpr TermId kNoTerm = std::numeric_limits<TermId>::max();

struct TripleRecord {
  TermId s;
  TermId p;
  TermId o;
  double p_exist;
};

struct Variable {
  std::string name;
  bool operator==(const Variable&) const = default;
};

using PatternSlot = std::variant<Term, Variable>;

struct TriplePattern {
  PatternSlot s;
  PatternSlot p;
  PatternSlot o;
};

struct Match {
  std::vector<std::pair<std::string, TermId>> binding;
  TripleId triple;
};

struct StatsReport {
  std::size_t triples = 0;
  std::size_t distinct_terms = 0;
  std::size_t dist_literals = 0;
  std::map<std::string, std::size_t> dist_by_family;
  std::size_t uncertain_triples = 0;
};

/// Immutable probabilistic triple store: interned terms plus three sorted
/// permutation indexes (SPO, POS, OSP) over triple ids.
class Graph {
 public:
  class Builder {
   public:
    /// Throws BadProbability tagged with `line`; duplicates are reported by
    /// build() with the line of the later occurrence.
    TripleId add(const Term& s, const Term& p, const Term& o, double p_exist = 1.0,
                 std::size_t line = 0);
    Graph build() &&;

   private:
    TermId intern(const Term& t);
    std::vector<Term> terms_;
    std::unordered_map<std::string, TermId> ids_;
    std::vector<TripleRecord> triples_;
    std::vector<std::size_t> lines_;
  };

  enum class Order { Spo, Pos, Osp };

  Graph() = default;

  std::size_t size() const noexcept { return triples_.size(); }
  bool empty() const noexcept { return triples_.empty(); }
  const TripleRecord& triple(TripleId id) const { return triples_[id]; }
  std::span<const TripleRecord> triples() const noexcept { return triples_; }

  std::size_t term_count() const noexcept { return terms_.size(); }
  const Term& term(TermId id) const { return terms_[id]; }
  std::optional<TermId> find(const Term& t) const;
  /// Position of the term in sorted key order; gives a stable total order.
  std::uint32_t rank(TermId id) const { return rank_[id]; }
  /// NaN unless the term is a numeric literal.
  double numeric(TermId id) const { return numeric_[id]; }
  const dist::Distribution* distribution(TermId id) const { return distribution_of(terms_[id]); }
  /// 1-d mixture literals packed as (weight, mean, sd) triples in one array,
  /// so threshold filters avoid chasing per-literal allocations. Empty for
  /// every other term.
  std::span<const double> packed_gmm(TermId id) const {
    if (id + 1 >= packed_at_.size()) return {};
    return {packed_.data() + packed_at_[id], packed_at_[id + 1] - packed_at_[id]};
  }

  std::span<const TripleId> index(Order order) const;

  /// Triple ids agreeing with every bound position (kNoTerm = unbound), in
  /// the order of the chosen index.
  std::span<const TripleId> candidates(TermId s, TermId p, TermId o) const;

  /// Every triple unifying with the pattern, ascending by triple id.
  std::vector<Match> match(const TriplePattern& pattern) const;

  StatsReport stats() const;

 private:
  std::vector<Term> terms_;
  std::unordered_map<std::string, TermId> ids_;
  std::vector<std::uint32_t> rank_;
  std::vector<double> numeric_;
  std::vector<std::size_t> packed_at_;
  std::vector<double> packed_;
  std::vector<TripleRecord> triples_;
  std::vector<TripleId> spo_, pos_, osp_, all_;
};

}  // namespace probkg::kg
