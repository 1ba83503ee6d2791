#include "probkg/query/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "probkg/query/parser.hpp"
#include "probkg/util/error.hpp"

namespace probkg::query {

VarId VarTable::add(const std::string& name) {
  auto [it, fresh] = ids_.emplace(name, static_cast<VarId>(names_.size()));
  if (fresh) names_.push_back(name);
  return it->second;
}

std::optional<VarId> VarTable::find(const std::string& name) const {
  auto it = ids_.find(name);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

kg::TermId TermTable::intern(const kg::Term& t) {
  if (auto id = g_->find(t)) return *id;
  std::string key = kg::term_key(t);
  if (auto it = extra_ids_.find(key); it != extra_ids_.end()) return it->second;
  const auto id = static_cast<kg::TermId>(g_->term_count() + extra_.size());
  extra_.push_back(t);
  extra_keys_.push_back(key);
  extra_ids_.emplace(std::move(key), id);
  return id;
}

const kg::Term& TermTable::term(kg::TermId id) const {
  return id < g_->term_count() ? g_->term(id) : extra_[id - g_->term_count()];
}

double TermTable::numeric(kg::TermId id) const {
  if (id < g_->term_count()) return g_->numeric(id);
  return kg::numeric_value(term(id)).value_or(std::nan(""));
}

std::shared_ptr<const dist::Distribution> TermTable::distribution(kg::TermId id) const {
  if (const auto* d = std::get_if<kg::DistLiteral>(&term(id))) return d->value;
  return nullptr;
}

std::span<const double> TermTable::packed_gmm(kg::TermId id) const {
  return id < g_->term_count() ? g_->packed_gmm(id) : std::span<const double>{};
}

int TermTable::compare(kg::TermId a, kg::TermId b) const {
  if (a == b) return 0;
  if (a == kg::kNoTerm) return -1;
  if (b == kg::kNoTerm) return 1;
  const auto n = g_->term_count();
  if (a < n && b < n) return g_->rank(a) < g_->rank(b) ? -1 : 1;
  const std::string ka = a < n ? kg::term_key(g_->term(a)) : extra_keys_[a - n];
  const std::string kb = b < n ? kg::term_key(g_->term(b)) : extra_keys_[b - n];
  return ka < kb ? -1 : ka > kb ? 1 : 0;
}

bool lineage_certain(const prov::Lineage& l, const kg::Graph& g) {
  using K = prov::LineageNode::Kind;
  switch (l->kind) {
    case K::Var: return g.triple(l->triple).p_exist == 1.0;
    case K::One: return true;
    case K::Zero:
    case K::Monus: return false;
    case K::Plus:
      return std::any_of(l->children.begin(), l->children.end(), [&](const auto& c) { return lineage_certain(c, g); });
    case K::Times:
      return std::all_of(l->children.begin(), l->children.end(), [&](const auto& c) { return lineage_certain(c, g); });
  }
  return false;
}

namespace {

using Op = PlanNode::Op;

struct KeyHash {
  std::size_t operator()(const std::vector<kg::TermId>& k) const noexcept {
    std::size_t h = 0x9e3779b97f4a7c15ULL;
    for (auto x : k) h = (h ^ x) * 0x100000001b3ULL;
    return h;
  }
};

class Evaluator {
 public:
  Evaluator(const Plan& plan, const kg::Graph& g, const EvalOptions& opts)
      : plan_(plan), g_(g), opts_(opts), terms_(std::make_shared<TermTable>(g)) {
    for (const auto& v : plan.select) vars_.add(v);
    collect(plan.root);
    if (opts.sampling) ctx_.sampling = &*opts.sampling;
    ctx_.terms = terms_.get();
  }

  ResultSet run() {
    std::vector<Row> rows = eval(plan_.root);
    ResultSet rs;
    rs.vars = plan_.select;
    rs.rows.reserve(rows.size());
    for (auto& r : rows) {
      Row p;
      p.vals.reserve(plan_.select.size());
      for (const auto& v : plan_.select) p.vals.push_back(r.vals[*vars_.find(v)]);
      p.lineage = std::move(r.lineage);
      rs.rows.push_back(std::move(p));
    }
    const TermTable& tt = *terms_;
    std::stable_sort(rs.rows.begin(), rs.rows.end(), [&](const Row& a, const Row& b) {
      for (std::size_t i = 0; i < a.vals.size(); ++i)
        if (const int c = tt.compare(a.vals[i], b.vals[i]); c != 0) return c < 0;
      return false;
    });
    rs.terms = terms_;
    rs.stats = stats_;
    return rs;
  }

 private:
  void collect_expr(const ExprPtr& e) {
    for (const auto& v : expr_vars(e)) vars_.add(v);
  }

  void collect(const PlanNodePtr& n) {
    if (n->op == Op::IndexScan)
      for (const auto& v : pattern_vars(n->pattern)) vars_.add(v);
    if (n->expr) collect_expr(n->expr);
    if (!n->var.empty()) vars_.add(n->var);
    if (!n->var_a.empty()) vars_.add(n->var_a);
    if (!n->var_b.empty()) vars_.add(n->var_b);
    for (const auto& c : n->children) collect(c);
  }

  const CompiledExpr& compiled(const ExprPtr& e) {
    auto it = exprs_.find(e.get());
    if (it == exprs_.end()) it = exprs_.emplace(e.get(), compile_expr(e, vars_, *terms_)).first;
    return it->second;
  }

  bool track() const { return opts_.lineage && !opts_.world; }

  Row unit_row() const {
    Row r;
    r.vals.assign(vars_.size(), kg::kNoTerm);
    if (track()) r.lineage = prov::one();
    return r;
  }

  bool passes(const ExprPtr& e, const Row& r) {
    const auto t = truth(eval_expr(compiled(e), r, ctx_));
    if (!t) ++stats_.warnings;
    return t.value_or(false);
  }

  struct ScanSlots {
    std::optional<kg::TermId> constant[3];  // nullopt: variable; kNoTerm: constant absent from graph
    VarId var[3] = {0, 0, 0};
  };

  const ScanSlots& slots(const PlanNode& n) {
    auto it = scan_slots_.find(&n);
    if (it != scan_slots_.end()) return it->second;
    ScanSlots s;
    const kg::PatternSlot* ps[3] = {&n.pattern.s, &n.pattern.p, &n.pattern.o};
    for (int i = 0; i < 3; ++i) {
      if (const auto* t = std::get_if<kg::Term>(ps[i]))
        s.constant[i] = g_.find(*t).value_or(kg::kNoTerm);
      else
        s.var[i] = *vars_.find(std::get<kg::Variable>(*ps[i]).name);
    }
    return scan_slots_.emplace(&n, s).first->second;
  }

  // Appends every extension of `base` by a triple matching the scan,
  // keeping those that pass `filters`.
  void scan_into(const PlanNode& n, const Row& base, const std::vector<const PlanNode*>& filters,
                 std::vector<Row>& out) {
    const ScanSlots& s = slots(n);
    kg::TermId fixed[3];
    for (int i = 0; i < 3; ++i) {
      if (s.constant[i]) {
        if (*s.constant[i] == kg::kNoTerm) return;
        fixed[i] = *s.constant[i];
      } else {
        const kg::TermId v = base.vals[s.var[i]];
        if (v != kg::kNoTerm && v >= g_.term_count()) return;
        fixed[i] = v;
      }
    }
    for (const kg::TripleId t : g_.candidates(fixed[0], fixed[1], fixed[2])) {
      if (opts_.world && !(*opts_.world)[t]) continue;
      const kg::TripleRecord& rec = g_.triple(t);
      const kg::TermId got[3] = {rec.s, rec.p, rec.o};
      Row r{base.vals, nullptr};
      bool ok = true;
      for (int i = 0; i < 3 && ok; ++i) {
        if (s.constant[i]) continue;
        kg::TermId& slot = r.vals[s.var[i]];
        if (slot == kg::kNoTerm)
          slot = got[i];
        else if (slot != got[i])
          ok = false;
      }
      if (!ok) continue;
      if (track()) r.lineage = prov::times({base.lineage, prov::var(t)});
      bool keep = true;
      for (const PlanNode* f : filters)
        if (!passes(f->expr, r)) {
          keep = false;
          break;
        }
      if (keep) out.push_back(std::move(r));
    }
  }

  // Filter*(IndexScan) chains on the right of a join run as index
  // nested-loop lookups.
  static const PlanNode* scan_chain(const PlanNode* n, std::vector<const PlanNode*>& filters) {
    while (n->op == Op::Filter) {
      filters.push_back(n);
      n = n->children[0].get();
    }
    return n->op == Op::IndexScan ? n : nullptr;
  }

  std::vector<VarId> key_vars(const PlanNode& a, const PlanNode& b) const {
    std::vector<VarId> out;
    for (const auto& v : a.certain)
      if (b.certain.count(v)) out.push_back(*vars_.find(v));
    return out;
  }

  using Index = std::unordered_map<std::vector<kg::TermId>, std::vector<std::size_t>, KeyHash>;

  static std::vector<kg::TermId> key_of(const Row& r, const std::vector<VarId>& keys) {
    std::vector<kg::TermId> k;
    k.reserve(keys.size());
    for (VarId v : keys) k.push_back(r.vals[v]);
    return k;
  }

  static Index build_index(const std::vector<Row>& rows, const std::vector<VarId>& keys) {
    Index idx;
    for (std::size_t i = 0; i < rows.size(); ++i) idx[key_of(rows[i], keys)].push_back(i);
    return idx;
  }

  // Indices of right rows compatible with l (restricted by key when indexed).
  template <class Fn>
  static void for_compatible(const Row& l, const std::vector<Row>& right, const std::vector<VarId>& keys,
                             const Index& idx, Fn&& fn) {
    if (keys.empty()) {
      for (std::size_t j = 0; j < right.size(); ++j)
        if (compatible(l, right[j])) fn(j);
      return;
    }
    auto it = idx.find(key_of(l, keys));
    if (it == idx.end()) return;
    for (std::size_t j : it->second)
      if (compatible(l, right[j])) fn(j);
  }

  std::vector<Row> eval(const PlanNodePtr& np) {
    const PlanNode& n = *np;
    switch (n.op) {
      case Op::Unit: return {unit_row()};
      case Op::IndexScan: {
        std::vector<Row> out;
        scan_into(n, unit_row(), {}, out);
        return out;
      }
      case Op::Join: {
        std::vector<Row> left = eval(n.children[0]);
        std::vector<const PlanNode*> filters;
        if (const PlanNode* sc = scan_chain(n.children[1].get(), filters)) {
          std::reverse(filters.begin(), filters.end());
          std::vector<Row> out;
          for (const auto& l : left) scan_into(*sc, l, filters, out);
          return out;
        }
        std::vector<Row> right = eval(n.children[1]);
        const auto keys = key_vars(*n.children[0], *n.children[1]);
        const Index idx = keys.empty() ? Index{} : build_index(right, keys);
        std::vector<Row> out;
        for (const auto& l : left) for_compatible(l, right, keys, idx, [&](std::size_t j) { out.push_back(merge(l, right[j])); });
        return out;
      }
      case Op::Filter: {
        std::vector<Row> in = eval(n.children[0]);
        std::vector<Row> out;
        for (auto& r : in)
          if (passes(n.expr, r)) out.push_back(std::move(r));
        return out;
      }
      case Op::Bind: {
        std::vector<Row> rows = eval(n.children[0]);
        const VarId target = *vars_.find(n.var);
        const CompiledExpr& e = compiled(n.expr);
        for (auto& r : rows) {
          const auto t = to_term(eval_expr(e, r, ctx_), *terms_);
          if (t)
            r.vals[target] = *t;
          else
            ++stats_.warnings;
        }
        return rows;
      }
      case Op::Union: {
        std::vector<Row> out = eval(n.children[0]);
        std::vector<Row> b = eval(n.children[1]);
        std::move(b.begin(), b.end(), std::back_inserter(out));
        return out;
      }
      case Op::LeftJoin:
      case Op::Minus: return difference(n);
      case Op::SimJoin: {
        std::vector<Row> left = eval(n.children[0]);
        std::vector<Row> right = eval(n.children[1]);
        SimJoinConfig cfg;
        cfg.var_a = *vars_.find(n.var_a);
        cfg.var_b = *vars_.find(n.var_b);
        cfg.theta = n.theta;
        cfg.grid = plan_.options.simjoin_grid;
        cfg.bins = plan_.options.simjoin_bins;
        cfg.prune = plan_.options.simjoin_prune;
        SimJoinStats st;
        auto out = eval_simjoin(left, right, cfg, *terms_, st);
        stats_.simjoin.candidates += st.candidates;
        stats_.simjoin.pruned += st.pruned;
        stats_.simjoin.survivors += st.survivors;
        stats_.simjoin.matches += st.matches;
        stats_.simjoin.warnings += st.warnings;
        stats_.warnings += st.warnings;
        return out;
      }
    }
    return {};
  }

  // OPTIONAL and MINUS. With lineage, a left mapping that has compatible
  // right mappings also survives on its own under Monus(l, sum of their
  // lineages), unless one of them is certain.
  std::vector<Row> difference(const PlanNode& n) {
    const bool optional = n.op == Op::LeftJoin;
    std::vector<Row> left = eval(n.children[0]);
    std::vector<Row> right = eval(n.children[1]);
    const auto keys = key_vars(*n.children[0], *n.children[1]);
    const Index idx = keys.empty() ? Index{} : build_index(right, keys);
    std::vector<Row> out;
    for (auto& l : left) {
      std::vector<std::size_t> matched;
      for_compatible(l, right, keys, idx, [&](std::size_t j) {
        if (optional) {
          matched.push_back(j);
          return;
        }
        for (std::size_t i = 0; i < l.vals.size(); ++i)
          if (l.vals[i] != kg::kNoTerm && right[j].vals[i] != kg::kNoTerm) {
            matched.push_back(j);
            return;
          }
      });
      if (optional)
        for (std::size_t j : matched) out.push_back(merge(l, right[j]));
      if (matched.empty()) {
        out.push_back(std::move(l));
        continue;
      }
      if (!track()) continue;
      std::vector<prov::Lineage> rs;
      bool certain = false;
      for (std::size_t j : matched) {
        if (lineage_certain(right[j].lineage, g_)) certain = true;
        rs.push_back(right[j].lineage);
      }
      if (certain) continue;
      l.lineage = prov::monus(l.lineage, prov::plus(std::move(rs)));
      out.push_back(std::move(l));
    }
    return out;
  }

  const Plan& plan_;
  const kg::Graph& g_;
  const EvalOptions& opts_;
  std::shared_ptr<TermTable> terms_;
  VarTable vars_;
  ExprContext ctx_;
  EvalStats stats_;
  std::unordered_map<const Expr*, CompiledExpr> exprs_;
  std::unordered_map<const PlanNode*, ScanSlots> scan_slots_;
};

}  // namespace

ResultSet evaluate(const Plan& plan, const kg::Graph& g, const EvalOptions& opts) {
  return Evaluator(plan, g, opts).run();
}

ResultSet run_query(std::string_view text, const kg::Graph& g, const PlanOptions& popts, const EvalOptions& eopts) {
  const QueryAst ast = parse_query(text);
  return evaluate(plan(ast, g, popts), g, eopts);
}

}  // namespace probkg::query
