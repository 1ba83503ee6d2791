#include "probkg/circuits/formula.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <unordered_map>
#include <unordered_set>

#include "probkg/util/error.hpp"

namespace probkg::circuits {

namespace {

using K = Formula::Kind;

BoolFormula make(K kind, std::vector<BoolFormula> children) {
  auto f = std::make_shared<Formula>();
  f->kind = kind;
  f->children = std::move(children);
  return f;
}

BoolFormula connective(K kind, std::vector<BoolFormula> in) {
  const K absorbing = kind == K::And ? K::False : K::True;
  const K neutral = kind == K::And ? K::True : K::False;
  std::vector<BoolFormula> out;
  out.reserve(in.size());
  for (auto& c : in) {
    if (c->kind == absorbing) return kind == K::And ? f_false() : f_true();
    if (c->kind == neutral) continue;
    if (c->kind == kind)
      out.insert(out.end(), c->children.begin(), c->children.end());
    else
      out.push_back(std::move(c));
  }
  if (out.empty()) return kind == K::And ? f_true() : f_false();
  if (out.size() == 1) return out.front();
  return make(kind, std::move(out));
}

}  // namespace

BoolFormula f_false() {
  static const BoolFormula f = make(K::False, {});
  return f;
}

BoolFormula f_true() {
  static const BoolFormula f = make(K::True, {});
  return f;
}

BoolFormula f_lit(Var v, bool positive) {
  auto f = std::make_shared<Formula>();
  f->kind = K::Lit;
  f->var = v;
  f->positive = positive;
  return f;
}

BoolFormula f_and(std::vector<BoolFormula> children) { return connective(K::And, std::move(children)); }
BoolFormula f_or(std::vector<BoolFormula> children) { return connective(K::Or, std::move(children)); }

BoolFormula f_not(const BoolFormula& f) {
  std::unordered_map<const Formula*, BoolFormula> memo;
  std::function<BoolFormula(const BoolFormula&)> go = [&](const BoolFormula& g) -> BoolFormula {
    if (auto it = memo.find(g.get()); it != memo.end()) return it->second;
    BoolFormula r;
    switch (g->kind) {
      case K::False: r = f_true(); break;
      case K::True: r = f_false(); break;
      case K::Lit: r = f_lit(g->var, !g->positive); break;
      case K::And:
      case K::Or: {
        std::vector<BoolFormula> cs;
        cs.reserve(g->children.size());
        for (const auto& c : g->children) cs.push_back(go(c));
        r = g->kind == K::And ? f_or(std::move(cs)) : f_and(std::move(cs));
        break;
      }
    }
    memo.emplace(g.get(), r);
    return r;
  };
  return go(f);
}

namespace {

template <class Fn>
void visit_unique(const BoolFormula& f, Fn&& fn) {
  std::unordered_set<const Formula*> seen;
  std::vector<const Formula*> stack{f.get()};
  while (!stack.empty()) {
    const Formula* g = stack.back();
    stack.pop_back();
    if (!seen.insert(g).second) continue;
    fn(*g);
    for (const auto& c : g->children) stack.push_back(c.get());
  }
}

}  // namespace

std::vector<Var> variables(const BoolFormula& f) {
  std::vector<Var> vs;
  visit_unique(f, [&](const Formula& g) {
    if (g.kind == K::Lit) vs.push_back(g.var);
  });
  std::sort(vs.begin(), vs.end());
  vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
  return vs;
}

bool evaluate(const BoolFormula& f, const std::function<bool(Var)>& value) {
  std::unordered_map<const Formula*, bool> memo;
  std::function<bool(const Formula&)> go = [&](const Formula& g) -> bool {
    if (auto it = memo.find(&g); it != memo.end()) return it->second;
    bool r = false;
    switch (g.kind) {
      case K::False: r = false; break;
      case K::True: r = true; break;
      case K::Lit: r = value(g.var) == g.positive; break;
      case K::And:
        r = std::all_of(g.children.begin(), g.children.end(), [&](const auto& c) { return go(*c); });
        break;
      case K::Or:
        r = std::any_of(g.children.begin(), g.children.end(), [&](const auto& c) { return go(*c); });
        break;
    }
    memo.emplace(&g, r);
    return r;
  };
  return go(*f);
}

bool is_nnf(const BoolFormula& f) {
  bool ok = true;
  visit_unique(f, [&](const Formula& g) {
    const bool leaf = g.kind == K::Lit || g.kind == K::True || g.kind == K::False;
    if (leaf != g.children.empty()) ok = false;
    if (!leaf && g.children.size() < 2) ok = false;
  });
  return ok;
}

bool is_monotone(const BoolFormula& f) {
  bool ok = true;
  visit_unique(f, [&](const Formula& g) {
    if (g.kind == K::Lit && !g.positive) ok = false;
  });
  return ok;
}

std::size_t node_count(const BoolFormula& f) {
  std::size_t n = 0;
  visit_unique(f, [&](const Formula&) { ++n; });
  return n;
}

std::string to_string(const BoolFormula& f) {
  switch (f->kind) {
    case K::False: return "F";
    case K::True: return "T";
    case K::Lit: return (f->positive ? "x" : "!x") + std::to_string(f->var);
    case K::And:
    case K::Or: {
      std::string out;
      const char* op = f->kind == K::And ? " & " : " | ";
      for (std::size_t i = 0; i < f->children.size(); ++i) {
        if (i) out += op;
        const auto& c = f->children[i];
        const bool wrap = c->kind == K::And || c->kind == K::Or;
        out += wrap ? "(" + to_string(c) + ")" : to_string(c);
      }
      return out;
    }
  }
  return {};
}

namespace {

class FormulaParser {
 public:
  explicit FormulaParser(std::string_view s) : s_(s) {}

  BoolFormula parse() {
    BoolFormula f = disjunction();
    skip();
    if (pos_ != s_.size()) error("unexpected character");
    return f;
  }

 private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  [[noreturn]] void error(const std::string& what) const {
    throw Error(Errc::Syntax, what, 1, pos_ + 1);
  }

  BoolFormula disjunction() {
    std::vector<BoolFormula> cs{conjunction()};
    while (eat('|')) cs.push_back(conjunction());
    return f_or(std::move(cs));
  }
  BoolFormula conjunction() {
    std::vector<BoolFormula> cs{unary()};
    while (eat('&')) cs.push_back(unary());
    return f_and(std::move(cs));
  }
  BoolFormula unary() {
    if (eat('!')) return f_not(unary());
    if (eat('(')) {
      BoolFormula f = disjunction();
      if (!eat(')')) error("expected ')'");
      return f;
    }
    skip();
    if (pos_ >= s_.size()) error("unexpected end of formula");
    const char c = s_[pos_];
    if (c == 'T') return ++pos_, f_true();
    if (c == 'F') return ++pos_, f_false();
    if (c == 'x') {
      ++pos_;
      Var v = 0;
      auto [p, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
      if (ec != std::errc{}) error("expected variable number");
      pos_ = static_cast<std::size_t>(p - s_.data());
      return f_lit(v);
    }
    error("expected literal");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

BoolFormula parse_formula(std::string_view text) { return FormulaParser(text).parse(); }

}  // namespace probkg::circuits
