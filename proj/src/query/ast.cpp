#include "probkg/query/ast.hpp"

#include <algorithm>

#include "probkg/dist/distribution.hpp"

namespace probkg::query {

PatternPtr make_bgp(std::vector<kg::TriplePattern> triples) {
  auto p = std::make_shared<Pattern>();
  p->kind = Pattern::Kind::Bgp;
  p->triples = std::move(triples);
  return p;
}

PatternPtr make_binary(Pattern::Kind kind, PatternPtr left, PatternPtr right) {
  auto p = std::make_shared<Pattern>();
  p->kind = kind;
  p->left = std::move(left);
  p->right = std::move(right);
  return p;
}

PatternPtr make_filter(PatternPtr input, ExprPtr cond) {
  auto p = std::make_shared<Pattern>();
  p->kind = Pattern::Kind::Filter;
  p->left = std::move(input);
  p->expr = std::move(cond);
  return p;
}

PatternPtr make_bind(PatternPtr input, ExprPtr e, std::string var) {
  auto p = std::make_shared<Pattern>();
  p->kind = Pattern::Kind::Bind;
  p->left = std::move(input);
  p->expr = std::move(e);
  p->var = std::move(var);
  return p;
}

PatternPtr make_simjoin(PatternPtr left, PatternPtr right, std::string a, std::string b, double theta) {
  auto p = std::make_shared<Pattern>();
  p->kind = Pattern::Kind::SimJoin;
  p->left = std::move(left);
  p->right = std::move(right);
  p->var_a = std::move(a);
  p->var_b = std::move(b);
  p->theta = theta;
  return p;
}

ExprPtr make_var(std::string name) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Var;
  e->name = std::move(name);
  return e;
}

ExprPtr make_const(kg::Term t) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Const;
  e->constant = std::move(t);
  return e;
}

ExprPtr make_call(Builtin b, std::vector<ExprPtr> args) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Call;
  e->builtin = b;
  e->args = std::move(args);
  return e;
}

ExprPtr make_binary_expr(std::string op, ExprPtr a, ExprPtr b) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Binary;
  e->op = std::move(op);
  e->args = {std::move(a), std::move(b)};
  return e;
}

std::string_view builtin_name(Builtin b) noexcept {
  switch (b) {
    case Builtin::Pgt: return "PGT";
    case Builtin::Pbetween: return "PBETWEEN";
    case Builtin::Cdf: return "CDF";
    case Builtin::Jsd: return "JSD";
    case Builtin::Conv: return "CONV";
    case Builtin::Fuse: return "FUSE";
    case Builtin::Mean: return "MEAN";
    case Builtin::Var: return "VAR";
  }
  return "?";
}

std::size_t builtin_arity(Builtin b) noexcept {
  switch (b) {
    case Builtin::Pbetween: return 3;
    case Builtin::Mean:
    case Builtin::Var: return 1;
    default: return 2;
  }
}

std::set<std::string> expr_vars(const ExprPtr& e) {
  std::set<std::string> out;
  if (e->kind == Expr::Kind::Var) out.insert(e->name);
  for (const auto& a : e->args) {
    auto sub = expr_vars(a);
    out.insert(sub.begin(), sub.end());
  }
  return out;
}

std::vector<std::string> pattern_vars(const kg::TriplePattern& tp) {
  std::vector<std::string> out;
  for (const auto* slot : {&tp.s, &tp.p, &tp.o})
    if (const auto* v = std::get_if<kg::Variable>(slot))
      if (std::find(out.begin(), out.end(), v->name) == out.end()) out.push_back(v->name);
  return out;
}

namespace {

std::set<std::string> set_union(std::set<std::string> a, const std::set<std::string>& b) {
  a.insert(b.begin(), b.end());
  return a;
}

std::set<std::string> set_intersection(const std::set<std::string>& a, const std::set<std::string>& b) {
  std::set<std::string> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

}  // namespace

std::set<std::string> certain_vars(const PatternPtr& p) {
  using K = Pattern::Kind;
  switch (p->kind) {
    case K::Bgp: {
      std::set<std::string> out;
      for (const auto& tp : p->triples)
        for (auto& v : pattern_vars(tp)) out.insert(v);
      return out;
    }
    case K::Join:
    case K::SimJoin: return set_union(certain_vars(p->left), certain_vars(p->right));
    case K::Union: return set_intersection(certain_vars(p->left), certain_vars(p->right));
    case K::Optional:
    case K::Minus:
    case K::Filter:
    case K::Bind: return certain_vars(p->left);
  }
  return {};
}

std::set<std::string> possible_vars(const PatternPtr& p) {
  using K = Pattern::Kind;
  switch (p->kind) {
    case K::Bgp: return certain_vars(p);
    case K::Join:
    case K::SimJoin:
    case K::Union:
    case K::Optional: return set_union(possible_vars(p->left), possible_vars(p->right));
    case K::Minus:
    case K::Filter: return possible_vars(p->left);
    case K::Bind: {
      auto s = possible_vars(p->left);
      s.insert(p->var);
      return s;
    }
  }
  return {};
}

std::vector<ExprPtr> conjuncts(const ExprPtr& e) {
  if (e->kind == Expr::Kind::Binary && e->op == "&&") {
    auto a = conjuncts(e->args[0]);
    auto b = conjuncts(e->args[1]);
    a.insert(a.end(), b.begin(), b.end());
    return a;
  }
  return {e};
}

std::string to_string(const kg::PatternSlot& s) {
  if (const auto* v = std::get_if<kg::Variable>(&s)) return "?" + v->name;
  const auto& t = std::get<kg::Term>(s);
  if (const auto* l = std::get_if<kg::Literal>(&t)) {
    const bool numeric = l->datatype == kg::kXsdInteger || l->datatype == kg::kXsdDecimal ||
                         l->datatype == kg::kXsdDouble;
    if (numeric && !l->lang) return l->lexical;
  }
  return kg::to_ntriples(t);
}

std::string to_string(const ExprPtr& e) {
  switch (e->kind) {
    case Expr::Kind::Var: return "?" + e->name;
    case Expr::Kind::Const: return to_string(kg::PatternSlot{e->constant});
    case Expr::Kind::Not: return "!(" + to_string(e->args[0]) + ")";
    case Expr::Kind::Neg: return "-(" + to_string(e->args[0]) + ")";
    case Expr::Kind::Binary:
      return "(" + to_string(e->args[0]) + " " + e->op + " " + to_string(e->args[1]) + ")";
    case Expr::Kind::Call: {
      std::string out(builtin_name(e->builtin));
      out += '(';
      for (std::size_t i = 0; i < e->args.size(); ++i) {
        if (i) out += ", ";
        out += to_string(e->args[i]);
      }
      return out + ')';
    }
  }
  return {};
}

namespace {

std::string content(const PatternPtr& p);

// A left operand that is a filter would otherwise absorb the following
// elements of the group when re-read.
std::string content_left(const PatternPtr& p) {
  if (p->kind == Pattern::Kind::Filter) return "{ " + content(p) + " }";
  return content(p);
}

std::string join_text(const std::string& a, const std::string& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  return a + " " + b;
}

std::string content(const PatternPtr& p) {
  using K = Pattern::Kind;
  switch (p->kind) {
    case K::Bgp: {
      std::string out;
      for (std::size_t i = 0; i < p->triples.size(); ++i) {
        if (i) out += " . ";
        const auto& tp = p->triples[i];
        out += to_string(tp.s) + " " + to_string(tp.p) + " " + to_string(tp.o);
      }
      return out;
    }
    case K::Join: return join_text(content_left(p->left), "{ " + content(p->right) + " }");
    case K::Union: return "{ " + content(p->left) + " } UNION { " + content(p->right) + " }";
    case K::Optional: return join_text(content_left(p->left), "OPTIONAL { " + content(p->right) + " }");
    case K::Minus: return join_text(content_left(p->left), "MINUS { " + content(p->right) + " }");
    case K::Filter: return join_text(content(p->left), "FILTER(" + to_string(p->expr) + ")");
    case K::Bind:
      return join_text(content_left(p->left), "BIND(" + to_string(p->expr) + " AS ?" + p->var + ")");
    case K::SimJoin: {
      std::string inner;
      if (p->left->kind == K::Bgp && p->right->kind == K::Bgp) {
        std::vector<kg::TriplePattern> all = p->left->triples;
        all.insert(all.end(), p->right->triples.begin(), p->right->triples.end());
        inner = content(make_bgp(std::move(all)));
      } else {
        inner = join_text(content_left(p->left), p->right->triples.empty() && p->right->kind == K::Bgp
                                                     ? std::string()
                                                     : "{ " + content(p->right) + " }");
      }
      return join_text(inner, "SIMJOIN(?" + p->var_a + ", ?" + p->var_b + ", JSD, " +
                                  dist::format_number(p->theta) + ")");
    }
  }
  return {};
}

}  // namespace

std::string to_string(const QueryAst& q) {
  std::string out = "SELECT";
  for (const auto& v : q.select) out += " ?" + v;
  const std::string body = content(q.where);
  out += body.empty() ? " WHERE { }" : " WHERE { " + body + " }";
  return out;
}

}  // namespace probkg::query
