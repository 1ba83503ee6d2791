#include "probkg/query/planner.hpp"

#include <algorithm>
#include <cmath>

namespace probkg::query {

std::string_view op_name(PlanNode::Op op) noexcept {
  switch (op) {
    case PlanNode::Op::Unit: return "Unit";
    case PlanNode::Op::IndexScan: return "IndexScan";
    case PlanNode::Op::Join: return "Join";
    case PlanNode::Op::Filter: return "Filter";
    case PlanNode::Op::Bind: return "Bind";
    case PlanNode::Op::Union: return "Union";
    case PlanNode::Op::LeftJoin: return "LeftJoin";
    case PlanNode::Op::Minus: return "Minus";
    case PlanNode::Op::SimJoin: return "SimJoin";
  }
  return "?";
}

namespace {

using Op = PlanNode::Op;

bool subset(const std::set<std::string>& a, const std::set<std::string>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

std::string pattern_text(const kg::TriplePattern& tp) {
  return to_string(tp.s) + " " + to_string(tp.p) + " " + to_string(tp.o);
}

std::string label(const PlanNodePtr& n) {
  if (n->op == Op::IndexScan) return "IndexScan(" + pattern_text(n->pattern) + ")";
  return std::string(op_name(n->op));
}

class Planner {
 public:
  Planner(const kg::Graph& g, const PlanOptions& opts) : g_(g), opts_(opts) {
    domain_ = std::max<double>(1.0, static_cast<double>(g.term_count()));
  }

  PlanNodePtr build(const PatternPtr& p) {
    using K = Pattern::Kind;
    switch (p->kind) {
      case K::Bgp: return bgp(p->triples);
      case K::Join: return binary(Op::Join, build(p->left), build(p->right));
      case K::Union: return binary(Op::Union, build(p->left), build(p->right));
      case K::Optional: return binary(Op::LeftJoin, build(p->left), build(p->right));
      case K::Minus: return binary(Op::Minus, build(p->left), build(p->right));
      case K::Bind: {
        auto n = unary(Op::Bind, build(p->left));
        n->expr = p->expr;
        n->var = p->var;
        return n;
      }
      case K::SimJoin: {
        auto n = binary(Op::SimJoin, build(p->left), build(p->right));
        n->var_a = p->var_a;
        n->var_b = p->var_b;
        n->theta = p->theta;
        n->estimate = std::max(1.0, 0.1 * n->children[0]->estimate * n->children[1]->estimate);
        return n;
      }
      case K::Filter: {
        PlanNodePtr inner = build(p->left);
        if (!opts_.pushdown) return filter(inner, p->expr);
        for (const auto& c : conjuncts(p->expr)) inner = place(inner, c);
        return inner;
      }
    }
    return nullptr;
  }

  std::vector<std::string> trace;

 private:
  double scan_count(const kg::TriplePattern& tp) const {
    auto id = [&](const kg::PatternSlot& s) -> std::optional<kg::TermId> {
      if (const auto* t = std::get_if<kg::Term>(&s)) return g_.find(*t);
      return kg::kNoTerm;
    };
    const auto s = id(tp.s), p = id(tp.p), o = id(tp.o);
    if (!s || !p || !o) return 0.0;
    return static_cast<double>(g_.candidates(*s, *p, *o).size());
  }

  PlanNodePtr scan(const kg::TriplePattern& tp) {
    auto n = std::make_shared<PlanNode>();
    n->op = Op::IndexScan;
    n->pattern = tp;
    n->estimate = scan_count(tp);
    for (auto& v : pattern_vars(tp)) n->certain.insert(v);
    return n;
  }

  PlanNodePtr bgp(const std::vector<kg::TriplePattern>& tps) {
    if (tps.empty()) {
      auto n = std::make_shared<PlanNode>();
      n->op = Op::Unit;
      return n;
    }
    std::vector<std::size_t> order(tps.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    if (opts_.pushdown) order = greedy_order(tps);
    PlanNodePtr acc = scan(tps[order[0]]);
    for (std::size_t i = 1; i < order.size(); ++i) acc = binary(Op::Join, acc, scan(tps[order[i]]));
    return acc;
  }

  // Smallest pattern first, then the smallest one connected to what is
  // already bound; disconnected patterns only when nothing connects.
  std::vector<std::size_t> greedy_order(const std::vector<kg::TriplePattern>& tps) const {
    std::vector<double> card(tps.size());
    for (std::size_t i = 0; i < tps.size(); ++i) card[i] = scan_count(tps[i]);
    std::vector<char> used(tps.size(), 0);
    std::set<std::string> bound;
    std::vector<std::size_t> order;
    while (order.size() < tps.size()) {
      std::optional<std::size_t> best;
      bool best_connected = false;
      for (std::size_t i = 0; i < tps.size(); ++i) {
        if (used[i]) continue;
        const auto vs = pattern_vars(tps[i]);
        const bool connected =
            order.empty() || std::any_of(vs.begin(), vs.end(), [&](const auto& v) { return bound.count(v) > 0; });
        if (!best || (connected && !best_connected) || (connected == best_connected && card[i] < card[*best])) {
          best = i;
          best_connected = connected;
        }
      }
      used[*best] = 1;
      order.push_back(*best);
      for (auto& v : pattern_vars(tps[*best])) bound.insert(v);
    }
    return order;
  }

  PlanNodePtr unary(Op op, PlanNodePtr child) {
    auto n = std::make_shared<PlanNode>();
    n->op = op;
    n->estimate = child->estimate;
    n->certain = child->certain;
    n->children = {std::move(child)};
    return n;
  }

  PlanNodePtr binary(Op op, PlanNodePtr a, PlanNodePtr b) {
    auto n = std::make_shared<PlanNode>();
    n->op = op;
    const double ea = a->estimate, eb = b->estimate;
    std::set<std::string> shared;
    std::set_intersection(a->certain.begin(), a->certain.end(), b->certain.begin(), b->certain.end(),
                          std::inserter(shared, shared.end()));
    const double join_est = ea * eb / std::pow(domain_, static_cast<double>(shared.size()));
    switch (op) {
      case Op::Join:
      case Op::SimJoin:
        n->estimate = join_est;
        n->certain = a->certain;
        n->certain.insert(b->certain.begin(), b->certain.end());
        break;
      case Op::Union:
        n->estimate = ea + eb;
        std::set_intersection(a->certain.begin(), a->certain.end(), b->certain.begin(), b->certain.end(),
                              std::inserter(n->certain, n->certain.end()));
        break;
      case Op::LeftJoin:
        n->estimate = std::max(ea, join_est);
        n->certain = a->certain;
        break;
      default:
        n->estimate = ea;
        n->certain = a->certain;
        break;
    }
    n->children = {std::move(a), std::move(b)};
    return n;
  }

  PlanNodePtr filter(PlanNodePtr child, ExprPtr e) {
    auto n = unary(Op::Filter, std::move(child));
    n->expr = std::move(e);
    n->estimate = 0.5 * n->estimate;
    return n;
  }

  // Moves one conjunct as deep as the variable-safety rules allow.
  PlanNodePtr place(const PlanNodePtr& n, const ExprPtr& c) {
    const auto vars = expr_vars(c);
    auto descend = [&](std::size_t i) {
      trace.push_back("FILTER(" + to_string(c) + ") pushed below " + std::string(op_name(n->op)) + " onto " +
                      label(n->children[i]));
      auto copy = std::make_shared<PlanNode>(*n);
      copy->children[i] = place(n->children[i], c);
      copy->estimate = 0.5 * n->estimate;
      return copy;
    };
    switch (n->op) {
      case Op::Join:
      case Op::SimJoin:
        if (subset(vars, n->children[0]->certain)) return descend(0);
        if (subset(vars, n->children[1]->certain)) return descend(1);
        break;
      case Op::Union: {
        auto copy = descend(0);
        trace.push_back("FILTER(" + to_string(c) + ") pushed below Union onto " + label(n->children[1]));
        copy->children[1] = place(n->children[1], c);
        return copy;
      }
      case Op::LeftJoin:
        if (subset(vars, n->children[0]->certain)) return descend(0);
        break;
      case Op::Minus: return descend(0);
      case Op::Bind:
        if (!vars.count(n->var)) return descend(0);
        break;
      case Op::Filter: {
        auto copy = std::make_shared<PlanNode>(*n);
        copy->children[0] = place(n->children[0], c);
        return copy;
      }
      default: break;
    }
    return filter(n, c);
  }

  const kg::Graph& g_;
  const PlanOptions& opts_;
  double domain_ = 1.0;
};

void render(const PlanNodePtr& n, int depth, std::string& out) {
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
  out += label(n);
  if (n->op == Op::Filter) out += " " + to_string(n->expr);
  if (n->op == Op::Bind) out += " " + to_string(n->expr) + " AS ?" + n->var;
  if (n->op == Op::SimJoin)
    out += " ?" + n->var_a + " ?" + n->var_b + " theta=" + std::to_string(n->theta);
  out += "  [est " + std::to_string(static_cast<long long>(std::llround(n->estimate))) + "]\n";
  for (const auto& c : n->children) render(c, depth + 1, out);
}

}  // namespace

Plan plan(const QueryAst& ast, const kg::Graph& g, const PlanOptions& opts) {
  Planner p(g, opts);
  Plan out;
  out.select = ast.select;
  out.options = opts;
  out.root = p.build(ast.where);
  out.trace = std::move(p.trace);
  return out;
}

std::string explain(const Plan& p) {
  std::string out;
  render(p.root, 0, out);
  for (const auto& t : p.trace) out += "pushdown: " + t + "\n";
  return out;
}

}  // namespace probkg::query
