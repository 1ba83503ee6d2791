#include "probkg/circuits/safe_plan.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

#include "probkg/query/evaluator.hpp"
#include "probkg/query/results.hpp"
#include "probkg/util/error.hpp"

namespace probkg::circuits {

namespace {

using Atoms = std::vector<kg::TriplePattern>;

std::set<std::string> free_vars(const kg::TriplePattern& tp, const std::set<std::string>& bound) {
  std::set<std::string> out;
  for (auto& v : query::pattern_vars(tp))
    if (!bound.count(v)) out.insert(v);
  return out;
}

// Builds the plan; returns false with a reason when no root variable exists.
bool build(const Atoms& atoms, const std::set<std::string>& bound, SafeNode& out, std::string& reason) {
  // Connected components over unbound variables.
  std::vector<std::size_t> comp(atoms.size());
  std::iota(comp.begin(), comp.end(), 0);
  auto find = [&](std::size_t x) {
    while (comp[x] != x) x = comp[x] = comp[comp[x]];
    return x;
  };
  std::vector<std::set<std::string>> fv(atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) fv[i] = free_vars(atoms[i], bound);
  for (std::size_t i = 0; i < atoms.size(); ++i)
    for (std::size_t j = i + 1; j < atoms.size(); ++j)
      for (const auto& v : fv[i])
        if (fv[j].count(v)) {
          comp[find(i)] = find(j);
          break;
        }
  std::map<std::size_t, Atoms> groups;
  for (std::size_t i = 0; i < atoms.size(); ++i) groups[find(i)].push_back(atoms[i]);

  if (groups.size() > 1) {
    out.kind = SafeNode::Kind::IndependentJoin;
    for (auto& [root, members] : groups) {
      SafeNode child;
      if (!build(members, bound, child, reason)) return false;
      out.children.push_back(std::move(child));
    }
    return true;
  }
  std::set<std::string> all;
  for (const auto& tp : atoms) {
    auto f = free_vars(tp, bound);
    all.insert(f.begin(), f.end());
  }
  if (all.empty()) {
    if (atoms.size() == 1) {
      out.kind = SafeNode::Kind::PatternLeaf;
      out.pattern = atoms.front();
      return true;
    }
    out.kind = SafeNode::Kind::IndependentJoin;
    for (const auto& tp : atoms) {
      SafeNode leaf;
      leaf.kind = SafeNode::Kind::PatternLeaf;
      leaf.pattern = tp;
      out.children.push_back(std::move(leaf));
    }
    return true;
  }
  // Root variable: free in every atom of the component.
  for (const auto& v : all) {
    if (std::all_of(atoms.begin(), atoms.end(), [&](const auto& tp) { return free_vars(tp, bound).count(v) > 0; })) {
      out.kind = SafeNode::Kind::IndependentProject;
      out.var = v;
      auto inner_bound = bound;
      inner_bound.insert(v);
      SafeNode child;
      if (!build(atoms, inner_bound, child, reason)) return false;
      out.children.push_back(std::move(child));
      return true;
    }
  }
  reason = "NotHierarchical: no variable occurs in every pattern of a connected component";
  return false;
}

}  // namespace

SafePlan safe_plan(const query::QueryAst& ast) {
  SafePlan plan;
  plan.head = ast.select;
  const auto& w = ast.where;
  if (w->kind != query::Pattern::Kind::Bgp || w->triples.empty()) {
    plan.reason = "UnsupportedShape: only a single non-empty basic graph pattern is classified";
    return plan;
  }
  std::set<std::string> predicates;
  for (const auto& tp : w->triples) {
    const auto* t = std::get_if<kg::Term>(&tp.p);
    if (!t || !kg::is_iri(*t)) {
      plan.reason = "UnsupportedShape: predicates must be constant IRIs";
      return plan;
    }
    if (!predicates.insert(std::get<kg::Iri>(*t).value).second) {
      plan.reason = "UnsupportedShape: repeated predicate (self-join)";
      return plan;
    }
  }
  const std::set<std::string> head(ast.select.begin(), ast.select.end());
  const auto bgp_vars = query::certain_vars(w);
  for (const auto& h : head)
    if (!bgp_vars.count(h)) {
      plan.reason = "UnsupportedShape: head variable ?" + h + " not bound by the pattern";
      return plan;
    }

  // Hierarchical test over existential variables.
  std::map<std::string, std::set<std::size_t>> at;
  for (std::size_t i = 0; i < w->triples.size(); ++i)
    for (auto& v : free_vars(w->triples[i], head)) at[v].insert(i);
  for (auto a = at.begin(); a != at.end(); ++a)
    for (auto b = std::next(a); b != at.end(); ++b) {
      const auto& x = a->second;
      const auto& y = b->second;
      std::vector<std::size_t> common;
      std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(common));
      const bool nested = common.size() == x.size() || common.size() == y.size();
      if (!common.empty() && !nested) {
        plan.reason = "NotHierarchical: pattern sets of ?" + a->first + " and ?" + b->first + " overlap";
        return plan;
      }
    }
  plan.safe = build(w->triples, head, plan.root, plan.reason);
  return plan;
}

std::string to_string(const SafeNode& n) {
  switch (n.kind) {
    case SafeNode::Kind::PatternLeaf:
      return "Leaf(" + query::to_string(n.pattern.s) + " " + query::to_string(n.pattern.p) + " " +
             query::to_string(n.pattern.o) + ")";
    case SafeNode::Kind::IndependentProject: return "Project[?" + n.var + "](" + to_string(n.children[0]) + ")";
    case SafeNode::Kind::IndependentJoin: {
      std::string out = "Join(";
      for (std::size_t i = 0; i < n.children.size(); ++i) out += (i ? ", " : "") + to_string(n.children[i]);
      return out + ")";
    }
  }
  return {};
}

namespace {

class Lifted {
 public:
  Lifted(const kg::Graph& g, const std::vector<double>* probs) : g_(g), probs_(probs) {}

  double eval(const SafeNode& n, std::map<std::string, kg::TermId>& bind) {
    switch (n.kind) {
      case SafeNode::Kind::PatternLeaf: {
        kg::TermId ids[3];
        if (!resolve(n.pattern, bind, ids)) return 0.0;
        const auto c = g_.candidates(ids[0], ids[1], ids[2]);
        if (c.empty()) return 0.0;
        return prob(c.front());
      }
      case SafeNode::Kind::IndependentJoin: {
        double p = 1.0;
        for (const auto& c : n.children) p *= eval(c, bind);
        return p;
      }
      case SafeNode::Kind::IndependentProject: {
        double none = 1.0;
        for (kg::TermId a : domain(n, bind)) {
          bind[n.var] = a;
          none *= 1.0 - eval(n.children[0], bind);
        }
        bind.erase(n.var);
        return 1.0 - none;
      }
    }
    return 0.0;
  }

 private:
  double prob(kg::TripleId t) const { return probs_ ? (*probs_)[t] : g_.triple(t).p_exist; }

  bool resolve(const kg::TriplePattern& tp, const std::map<std::string, kg::TermId>& bind, kg::TermId ids[3]) const {
    const kg::PatternSlot* ps[3] = {&tp.s, &tp.p, &tp.o};
    for (int i = 0; i < 3; ++i) {
      if (const auto* t = std::get_if<kg::Term>(ps[i])) {
        auto id = g_.find(*t);
        if (!id) return false;
        ids[i] = *id;
      } else {
        auto it = bind.find(std::get<kg::Variable>(*ps[i]).name);
        ids[i] = it == bind.end() ? kg::kNoTerm : it->second;
      }
    }
    return true;
  }

  static const kg::TriplePattern* leaf_with(const SafeNode& n, const std::string& v) {
    if (n.kind == SafeNode::Kind::PatternLeaf) {
      const auto vs = query::pattern_vars(n.pattern);
      return std::find(vs.begin(), vs.end(), v) != vs.end() ? &n.pattern : nullptr;
    }
    for (const auto& c : n.children)
      if (const auto* p = leaf_with(c, v)) return p;
    return nullptr;
  }

  std::vector<kg::TermId> domain(const SafeNode& n, const std::map<std::string, kg::TermId>& bind) const {
    const kg::TriplePattern* tp = leaf_with(n.children[0], n.var);
    std::vector<kg::TermId> out;
    kg::TermId ids[3];
    if (!tp || !resolve(*tp, bind, ids)) return out;
    const kg::PatternSlot* ps[3] = {&tp->s, &tp->p, &tp->o};
    for (kg::TripleId t : g_.candidates(ids[0], ids[1], ids[2])) {
      const auto& r = g_.triple(t);
      const kg::TermId got[3] = {r.s, r.p, r.o};
      for (int i = 0; i < 3; ++i)
        if (const auto* v = std::get_if<kg::Variable>(ps[i]); v && v->name == n.var) {
          out.push_back(got[i]);
          break;
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  const kg::Graph& g_;
  const std::vector<double>* probs_;
};

}  // namespace

double lifted_probability(const SafePlan& plan, const kg::Graph& g, const std::vector<kg::TermId>& head_vals,
                          const std::vector<double>* probs) {
  if (!plan.safe) fail(Errc::InvalidArgument, "lifted evaluation needs a safe plan");
  std::map<std::string, kg::TermId> bind;
  for (std::size_t i = 0; i < plan.head.size(); ++i) bind[plan.head[i]] = head_vals.at(i);
  return Lifted(g, probs).eval(plan.root, bind);
}

std::map<std::vector<kg::TermId>, double> lifted_eval(const SafePlan& plan, const kg::Graph& g,
                                                      const std::vector<double>* probs) {
  std::map<std::vector<kg::TermId>, double> out;
  if (!plan.safe) return out;
  // Head tuples are the distinct projections of the deterministic matches.
  query::QueryAst ast;
  ast.select = plan.head;
  std::vector<kg::TriplePattern> atoms;
  std::function<void(const SafeNode&)> gather = [&](const SafeNode& n) {
    if (n.kind == SafeNode::Kind::PatternLeaf) atoms.push_back(n.pattern);
    for (const auto& c : n.children) gather(c);
  };
  gather(plan.root);
  ast.where = query::make_bgp(std::move(atoms));
  query::EvalOptions eo;
  eo.lineage = false;
  const auto rs = query::evaluate(query::plan(ast, g), g, eo);

  for (const auto& a : query::distinct_answers(rs)) out[a.vals] = lifted_probability(plan, g, a.vals, probs);
  return out;
}

}  // namespace probkg::circuits
