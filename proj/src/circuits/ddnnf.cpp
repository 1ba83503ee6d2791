#include "probkg/circuits/ddnnf.hpp"

#include <algorithm>
#include <sstream>

#include "probkg/util/error.hpp"

namespace probkg::circuits {

namespace {

using K = DNode::Kind;

std::vector<std::vector<Var>> varsets(const DDnnf& c) {
  std::vector<std::vector<Var>> vs(c.nodes.size());
  for (std::size_t i = 0; i < c.nodes.size(); ++i) {
    const DNode& n = c.nodes[i];
    if (n.kind == K::Leaf) {
      vs[i] = {n.var};
      continue;
    }
    std::vector<Var> acc;
    for (NodeId ch : n.children) {
      std::vector<Var> merged;
      std::set_union(acc.begin(), acc.end(), vs[ch].begin(), vs[ch].end(), std::back_inserter(merged));
      acc.swap(merged);
    }
    if (n.kind == K::Or) {
      std::vector<Var> merged;
      const std::vector<Var> self{n.var};
      std::set_union(acc.begin(), acc.end(), self.begin(), self.end(), std::back_inserter(merged));
      acc.swap(merged);
    }
    vs[i] = std::move(acc);
  }
  return vs;
}

// Does node `id` force literal (v, positive)?
bool entails(const DDnnf& c, NodeId id, Var v, bool positive) {
  const DNode& n = c.nodes[id];
  if (n.kind == K::False) return true;
  if (n.kind == K::Leaf) return n.var == v && n.positive == positive;
  if (n.kind == K::And)
    return std::any_of(n.children.begin(), n.children.end(), [&](NodeId ch) {
      const DNode& m = c.nodes[ch];
      return m.kind == K::Leaf && m.var == v && m.positive == positive;
    });
  return false;
}

}  // namespace

double wmc(const DDnnf& c, const Weights& weights) {
  if (c.nodes.empty()) return 0.0;
  const auto vs = varsets(c);
  auto weight_of = [&](Var v) -> const LitWeight& {
    auto it = weights.find(v);
    if (it == weights.end()) fail(Errc::MissingWeight, "no weight for variable " + std::to_string(v));
    return it->second;
  };
  auto smoothing = [&](const std::vector<Var>& outer, const std::vector<Var>& inner) {
    double f = 1.0;
    std::size_t j = 0;
    for (Var v : outer) {
      while (j < inner.size() && inner[j] < v) ++j;
      if (j < inner.size() && inner[j] == v) continue;
      const LitWeight& w = weight_of(v);
      f *= w.pos + w.neg;
    }
    return f;
  };

  std::vector<double> val(c.nodes.size());
  for (std::size_t i = 0; i < c.nodes.size(); ++i) {
    const DNode& n = c.nodes[i];
    switch (n.kind) {
      case K::False: val[i] = 0.0; break;
      case K::True: val[i] = 1.0; break;
      case K::Leaf: {
        const LitWeight& w = weight_of(n.var);
        val[i] = n.positive ? w.pos : w.neg;
        break;
      }
      case K::And: {
        double p = 1.0;
        for (NodeId ch : n.children) p *= val[ch];
        val[i] = p;
        break;
      }
      case K::Or: {
        double s = 0.0;
        for (NodeId ch : n.children) s += val[ch] * smoothing(vs[i], vs[ch]);
        val[i] = s;
        break;
      }
    }
  }
  std::vector<Var> universe;
  for (const auto& [v, w] : weights) universe.push_back(v);
  for (Var v : vs[c.root])
    if (!weights.count(v)) weight_of(v);
  return val[c.root] * smoothing(universe, vs[c.root]);
}

std::vector<Var> circuit_variables(const DDnnf& c) {
  if (c.nodes.empty()) return {};
  return varsets(c)[c.root];
}

bool circuit_evaluate(const DDnnf& c, const std::function<bool(Var)>& value) {
  if (c.nodes.empty()) return false;
  std::vector<char> val(c.nodes.size());
  for (std::size_t i = 0; i < c.nodes.size(); ++i) {
    const DNode& n = c.nodes[i];
    switch (n.kind) {
      case K::False: val[i] = 0; break;
      case K::True: val[i] = 1; break;
      case K::Leaf: val[i] = value(n.var) == n.positive; break;
      case K::And:
        val[i] = std::all_of(n.children.begin(), n.children.end(), [&](NodeId ch) { return val[ch] != 0; });
        break;
      case K::Or:
        val[i] = std::any_of(n.children.begin(), n.children.end(), [&](NodeId ch) { return val[ch] != 0; });
        break;
    }
  }
  return val[c.root] != 0;
}

VerifyReport verify_circuit(const DDnnf& c) {
  auto violation = [](NodeId id, std::string what) {
    return VerifyReport{false, std::move(what), id};
  };
  if (c.nodes.empty()) return {false, "empty circuit", std::nullopt};
  if (c.root >= c.nodes.size()) return {false, "root out of range", std::nullopt};
  for (NodeId i = 0; i < c.nodes.size(); ++i) {
    const DNode& n = c.nodes[i];
    for (NodeId ch : n.children)
      if (ch >= i) return violation(i, "child does not precede parent");
    const bool leafish = n.kind == K::False || n.kind == K::True || n.kind == K::Leaf;
    if (leafish && !n.children.empty()) return violation(i, "leaf with children");
    if (n.kind == K::Or && n.children.size() != 2) return violation(i, "or node needs exactly two branches");
  }
  const auto vs = varsets(c);
  for (NodeId i = 0; i < c.nodes.size(); ++i) {
    const DNode& n = c.nodes[i];
    if (n.kind == K::And) {
      std::vector<Var> seen;
      for (NodeId ch : n.children) {
        std::vector<Var> common;
        std::set_intersection(seen.begin(), seen.end(), vs[ch].begin(), vs[ch].end(), std::back_inserter(common));
        if (!common.empty())
          return violation(i, "decomposability: variable " + std::to_string(common.front()) +
                                  " shared by and-children");
        std::vector<Var> merged;
        std::set_union(seen.begin(), seen.end(), vs[ch].begin(), vs[ch].end(), std::back_inserter(merged));
        seen.swap(merged);
      }
    } else if (n.kind == K::Or) {
      if (!entails(c, n.children[0], n.var, true) || !entails(c, n.children[1], n.var, false))
        return violation(i, "determinism: branches not conditioned on variable " + std::to_string(n.var));
    }
  }
  return {};
}

std::string export_circuit(const DDnnf& c) {
  std::ostringstream out;
  out << "ddnnf " << c.nodes.size() << ' ' << c.root << '\n';
  for (std::size_t i = 0; i < c.nodes.size(); ++i) {
    const DNode& n = c.nodes[i];
    out << i;
    switch (n.kind) {
      case K::False: out << " F"; break;
      case K::True: out << " T"; break;
      case K::Leaf: out << " L " << (n.positive ? '+' : '-') << n.var; break;
      case K::And:
        out << " A";
        for (NodeId ch : n.children) out << ' ' << ch;
        break;
      case K::Or: out << " O " << n.var << ' ' << n.children[0] << ' ' << n.children[1]; break;
    }
    out << '\n';
  }
  return out.str();
}

DDnnf import_circuit(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string tag;
  std::size_t count = 0;
  DDnnf c;
  if (!(in >> tag >> count >> c.root) || tag != "ddnnf") fail(Errc::LineParse, "bad circuit header");
  std::string line;
  std::getline(in, line);
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::getline(in, line)) fail(Errc::LineParse, "circuit truncated");
    std::istringstream ls(line);
    std::size_t id = 0;
    char kind = 0;
    if (!(ls >> id >> kind) || id != i) fail(Errc::LineParse, "bad node line: " + line);
    DNode n;
    switch (kind) {
      case 'F': n.kind = K::False; break;
      case 'T': n.kind = K::True; break;
      case 'L': {
        std::string lit;
        ls >> lit;
        if (lit.size() < 2 || (lit[0] != '+' && lit[0] != '-')) fail(Errc::LineParse, "bad literal: " + line);
        n.kind = K::Leaf;
        n.positive = lit[0] == '+';
        n.var = static_cast<Var>(std::stoul(lit.substr(1)));
        break;
      }
      case 'A': {
        n.kind = K::And;
        NodeId ch = 0;
        while (ls >> ch) n.children.push_back(ch);
        break;
      }
      case 'O': {
        n.kind = K::Or;
        NodeId hi = 0, lo = 0;
        if (!(ls >> n.var >> hi >> lo)) fail(Errc::LineParse, "bad or node: " + line);
        n.children = {hi, lo};
        break;
      }
      default: fail(Errc::LineParse, "unknown node kind: " + line);
    }
    c.nodes.push_back(std::move(n));
  }
  if (c.root >= c.nodes.size()) fail(Errc::LineParse, "root out of range");
  return c;
}

}  // namespace probkg::circuits
