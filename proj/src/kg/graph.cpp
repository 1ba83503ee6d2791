#include "probkg/kg/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "probkg/util/error.hpp"

namespace probkg::kg {

TermId Graph::Builder::intern(const Term& t) {
  auto [it, inserted] = ids_.try_emplace(term_key(t), static_cast<TermId>(terms_.size()));
  if (inserted) terms_.push_back(t);
  return it->second;
}

TripleId Graph::Builder::add(const Term& s, const Term& p, const Term& o, double p_exist,
                             std::size_t line) {
  if (is_literal(s)) throw Error(Errc::LineParse, "subject must be an IRI or blank node", line);
  if (!is_iri(p)) throw Error(Errc::LineParse, "predicate must be an IRI", line);
  if (!(p_exist > 0.0 && p_exist <= 1.0))
    throw Error(Errc::BadProbability, "existence probability must be in (0,1]", line);
  const TripleId id = static_cast<TripleId>(triples_.size());
  triples_.push_back({intern(s), intern(p), intern(o), p_exist});
  lines_.push_back(line);
  return id;
}

Graph Graph::Builder::build() && {
  Graph g;
  g.terms_ = std::move(terms_);
  g.ids_ = std::move(ids_);
  g.triples_ = std::move(triples_);
  const auto& tr = g.triples_;

  const std::size_t n = tr.size();
  g.all_.resize(n);
  std::iota(g.all_.begin(), g.all_.end(), TripleId{0});
  g.spo_ = g.pos_ = g.osp_ = g.all_;
  auto sort_by = [&](std::vector<TripleId>& idx, auto key) {
    std::sort(idx.begin(), idx.end(), [&](TripleId a, TripleId b) {
      const auto ka = key(tr[a]);
      const auto kb = key(tr[b]);
      return ka != kb ? ka < kb : a < b;
    });
  };
  sort_by(g.spo_, [](const TripleRecord& t) { return std::tuple(t.s, t.p, t.o); });
  sort_by(g.pos_, [](const TripleRecord& t) { return std::tuple(t.p, t.o, t.s); });
  sort_by(g.osp_, [](const TripleRecord& t) { return std::tuple(t.o, t.s, t.p); });

  for (std::size_t i = 1; i < n; ++i) {
    const auto& a = tr[g.spo_[i - 1]];
    const auto& b = tr[g.spo_[i]];
    if (a.s == b.s && a.p == b.p && a.o == b.o)
      throw Error(Errc::DuplicateTriple, "triple already stated",
                  lines_[std::max(g.spo_[i - 1], g.spo_[i])]);
  }

  std::vector<std::string> keys(g.terms_.size());
  for (std::size_t i = 0; i < g.terms_.size(); ++i) keys[i] = to_ntriples(g.terms_[i]);
  std::vector<TermId> order(g.terms_.size());
  std::iota(order.begin(), order.end(), TermId{0});
  std::sort(order.begin(), order.end(), [&](TermId a, TermId b) { return keys[a] < keys[b]; });
  g.rank_.resize(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) g.rank_[order[r]] = static_cast<std::uint32_t>(r);

  g.numeric_.resize(g.terms_.size());
  for (std::size_t i = 0; i < g.terms_.size(); ++i)
    g.numeric_[i] = numeric_value(g.terms_[i]).value_or(std::nan(""));

  g.packed_at_.assign(1, 0);
  for (const auto& t : g.terms_) {
    if (const auto* d = distribution_of(t))
      if (const auto* m = std::get_if<dist::Gmm>(d); m && m->dim() == 1)
        for (std::size_t k = 0; k < m->size(); ++k) {
          g.packed_.push_back(m->weights[k]);
          g.packed_.push_back(m->components[k].mean[0]);
          g.packed_.push_back(std::sqrt(m->components[k].var[0]));
        }
    g.packed_at_.push_back(g.packed_.size());
  }
  return g;
}

std::optional<TermId> Graph::find(const Term& t) const {
  const auto it = ids_.find(term_key(t));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::span<const TripleId> Graph::index(Order order) const {
  switch (order) {
    case Order::Spo: return spo_;
    case Order::Pos: return pos_;
    case Order::Osp: return osp_;
  }
  return {};
}

namespace {
// Sentinel wider than any id so that an unbound trailing position spans all.
constexpr std::uint64_t kWild = std::uint64_t{1} << 33;

template <class Key>
std::span<const TripleId> prefix_range(const std::vector<TripleId>& idx,
                                       const std::vector<TripleRecord>& tr, Key key,
                                       std::tuple<std::uint64_t, std::uint64_t> lo_k,
                                       std::tuple<std::uint64_t, std::uint64_t> hi_k) {
  auto lo = std::lower_bound(idx.begin(), idx.end(), lo_k, [&](TripleId id, const auto& k) {
    return key(tr[id]) < k;
  });
  auto hi = std::upper_bound(lo, idx.end(), hi_k, [&](const auto& k, TripleId id) {
    return k < key(tr[id]);
  });
  return {idx.data() + (lo - idx.begin()), static_cast<std::size_t>(hi - lo)};
}
}  // namespace

std::span<const TripleId> Graph::candidates(TermId s, TermId p, TermId o) const {
  const bool bs = s != kNoTerm, bp = p != kNoTerm, bo = o != kNoTerm;
  auto two = [](std::uint64_t a, std::uint64_t b) { return std::tuple(a, b); };
  auto sp_key = [](const TripleRecord& t) { return std::tuple<std::uint64_t, std::uint64_t>(t.s, t.p); };
  auto po_key = [](const TripleRecord& t) { return std::tuple<std::uint64_t, std::uint64_t>(t.p, t.o); };
  auto os_key = [](const TripleRecord& t) { return std::tuple<std::uint64_t, std::uint64_t>(t.o, t.s); };

  if (bs && bp && bo) {
    // Exact lookup: SPO prefix (s,p) then filter on o by a second search.
    auto r = prefix_range(spo_, triples_, sp_key, two(s, p), two(s, p));
    auto it = std::lower_bound(r.begin(), r.end(), o,
                               [&](TripleId id, TermId v) { return triples_[id].o < v; });
    if (it != r.end() && triples_[*it].o == o) return {&*it, 1};
    return {};
  }
  if (bs && bp) return prefix_range(spo_, triples_, sp_key, two(s, p), two(s, p));
  if (bs && bo) return prefix_range(osp_, triples_, os_key, two(o, s), two(o, s));
  if (bp && bo) return prefix_range(pos_, triples_, po_key, two(p, o), two(p, o));
  if (bs) return prefix_range(spo_, triples_, sp_key, two(s, 0), two(s, kWild));
  if (bp) return prefix_range(pos_, triples_, po_key, two(p, 0), two(p, kWild));
  if (bo) return prefix_range(osp_, triples_, os_key, two(o, 0), two(o, kWild));
  return all_;
}

std::vector<Match> Graph::match(const TriplePattern& pattern) const {
  const PatternSlot* slots[3] = {&pattern.s, &pattern.p, &pattern.o};
  TermId bound[3] = {kNoTerm, kNoTerm, kNoTerm};
  const std::string* names[3] = {nullptr, nullptr, nullptr};
  for (int i = 0; i < 3; ++i) {
    if (const auto* t = std::get_if<Term>(slots[i])) {
      const auto id = find(*t);
      if (!id) return {};
      bound[i] = *id;
    } else {
      names[i] = &std::get<Variable>(*slots[i]).name;
    }
  }
  std::vector<Match> out;
  for (TripleId id : candidates(bound[0], bound[1], bound[2])) {
    const TripleRecord& t = triples_[id];
    const TermId vals[3] = {t.s, t.p, t.o};
    Match m{{}, id};
    bool ok = true;
    for (int i = 0; i < 3 && ok; ++i) {
      if (!names[i]) continue;
      for (auto& [name, val] : m.binding) {
        if (name == *names[i] && val != vals[i]) ok = false;
      }
      if (ok && std::none_of(m.binding.begin(), m.binding.end(),
                             [&](const auto& b) { return b.first == *names[i]; }))
        m.binding.emplace_back(*names[i], vals[i]);
    }
    if (ok) out.push_back(std::move(m));
  }
  std::sort(out.begin(), out.end(), [](const Match& a, const Match& b) { return a.triple < b.triple; });
  return out;
}

StatsReport Graph::stats() const {
  StatsReport r;
  r.triples = triples_.size();
  r.distinct_terms = terms_.size();
  for (const auto& t : triples_) {
    if (t.p_exist < 1.0) ++r.uncertain_triples;
    if (const auto* d = distribution(t.o)) {
      ++r.dist_literals;
      ++r.dist_by_family[std::string(dist::family_name(dist::family_of(*d)))];
    }
  }
  return r;
}

}  // namespace probkg::kg
