#include "probkg/prov/lineage.hpp"

#include <algorithm>
#include <functional>
#include <unordered_map>
#include <unordered_set>

namespace probkg::prov {

namespace {

using K = LineageNode::Kind;

Lineage make(K kind, std::vector<Lineage> children, std::uint32_t triple = 0) {
  auto n = std::make_shared<LineageNode>();
  n->kind = kind;
  n->triple = triple;
  n->children = std::move(children);
  return n;
}

}  // namespace

Lineage var(std::uint32_t triple) { return make(K::Var, {}, triple); }

Lineage zero() {
  static const Lineage z = make(K::Zero, {});
  return z;
}

Lineage one() {
  static const Lineage o = make(K::One, {});
  return o;
}

Lineage plus(std::vector<Lineage> xs) {
  std::vector<Lineage> out;
  for (auto& x : xs) {
    if (x->kind == K::Zero) continue;
    if (x->kind == K::Plus)
      out.insert(out.end(), x->children.begin(), x->children.end());
    else
      out.push_back(std::move(x));
  }
  if (out.empty()) return zero();
  if (out.size() == 1) return out.front();
  return make(K::Plus, std::move(out));
}

Lineage times(std::vector<Lineage> xs) {
  std::vector<Lineage> out;
  for (auto& x : xs) {
    if (x->kind == K::Zero) return zero();
    if (x->kind == K::One) continue;
    if (x->kind == K::Times)
      out.insert(out.end(), x->children.begin(), x->children.end());
    else
      out.push_back(std::move(x));
  }
  if (out.empty()) return one();
  if (out.size() == 1) return out.front();
  return make(K::Times, std::move(out));
}

Lineage monus(Lineage left, Lineage right) {
  if (right->kind == K::Zero || left->kind == K::Zero) return left;
  if (right->kind == K::One) return zero();
  return make(K::Monus, {std::move(left), std::move(right)});
}

bool has_monus(const Lineage& l) {
  if (l->kind == K::Monus) return true;
  return std::any_of(l->children.begin(), l->children.end(), [](const Lineage& c) { return has_monus(c); });
}

std::vector<std::uint32_t> triples_of(const Lineage& l) {
  std::vector<std::uint32_t> out;
  std::unordered_set<const LineageNode*> seen;
  std::vector<const LineageNode*> stack{l.get()};
  while (!stack.empty()) {
    const LineageNode* n = stack.back();
    stack.pop_back();
    if (!seen.insert(n).second) continue;
    if (n->kind == K::Var) out.push_back(n->triple);
    for (const auto& c : n->children) stack.push_back(c.get());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

circuits::BoolFormula to_boolean(const Lineage& l) {
  std::unordered_map<const LineageNode*, circuits::BoolFormula> memo;
  std::function<circuits::BoolFormula(const Lineage&)> go = [&](const Lineage& n) {
    if (auto it = memo.find(n.get()); it != memo.end()) return it->second;
    circuits::BoolFormula r;
    switch (n->kind) {
      case K::Var: r = circuits::f_lit(n->triple); break;
      case K::Zero: r = circuits::f_false(); break;
      case K::One: r = circuits::f_true(); break;
      case K::Plus:
      case K::Times: {
        std::vector<circuits::BoolFormula> cs;
        for (const auto& c : n->children) cs.push_back(go(c));
        r = n->kind == K::Plus ? circuits::f_or(std::move(cs)) : circuits::f_and(std::move(cs));
        break;
      }
      case K::Monus:
        r = circuits::f_and({go(n->children[0]), circuits::f_not(go(n->children[1]))});
        break;
    }
    memo.emplace(n.get(), r);
    return r;
  };
  return go(l);
}

std::string to_string(const Lineage& l) {
  switch (l->kind) {
    case K::Var: return "x" + std::to_string(l->triple);
    case K::Zero: return "0";
    case K::One: return "1";
    case K::Plus:
    case K::Times:
    case K::Monus: {
      const char* op = l->kind == K::Plus ? " + " : l->kind == K::Times ? " * " : " - ";
      std::string out;
      for (std::size_t i = 0; i < l->children.size(); ++i) {
        if (i) out += op;
        const auto& c = l->children[i];
        const bool leaf = c->kind == K::Var || c->kind == K::Zero || c->kind == K::One;
        out += leaf ? to_string(c) : "(" + to_string(c) + ")";
      }
      return out;
    }
  }
  return {};
}

}  // namespace probkg::prov
