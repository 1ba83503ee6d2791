#include "probkg/circuits/compiler.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <numeric>

#include "probkg/util/error.hpp"

namespace probkg::circuits {

namespace {

using FId = std::uint32_t;
constexpr FId kFalse = 0;
constexpr FId kTrue = 1;

// Hash-consed formula DAG. Connective children are sorted by id, so
// structurally equal sub-formulas share one id.
class Manager {
 public:
  enum class Kind : std::uint8_t { False, True, Lit, And, Or };
  struct Node {
    Kind kind;
    Var var;
    bool positive;
    std::vector<FId> children;
    std::vector<Var> vars;
  };

  Manager() {
    nodes_.push_back({Kind::False, 0, true, {}, {}});
    nodes_.push_back({Kind::True, 0, true, {}, {}});
  }

  const Node& node(FId id) const { return nodes_[id]; }

  FId lit(Var v, bool positive) {
    std::string key = "L";
    append(key, v);
    key += positive ? '+' : '-';
    if (auto it = unique_.find(key); it != unique_.end()) return it->second;
    return insert(std::move(key), {Kind::Lit, v, positive, {}, {v}});
  }

  FId connective(Kind kind, std::vector<FId> in) {
    const FId absorbing = kind == Kind::And ? kFalse : kTrue;
    const FId neutral = kind == Kind::And ? kTrue : kFalse;
    std::vector<FId> cs;
    cs.reserve(in.size());
    for (FId c : in) {
      if (c == absorbing) return absorbing;
      if (c == neutral) continue;
      if (nodes_[c].kind == kind)
        cs.insert(cs.end(), nodes_[c].children.begin(), nodes_[c].children.end());
      else
        cs.push_back(c);
    }
    std::sort(cs.begin(), cs.end());
    cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
    if (cs.empty()) return neutral;
    if (cs.size() == 1) return cs.front();
    // Complementary literals.
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const Node& a = nodes_[cs[i]];
      if (a.kind != Kind::Lit) continue;
      for (std::size_t j = i + 1; j < cs.size(); ++j) {
        const Node& b = nodes_[cs[j]];
        if (b.kind == Kind::Lit && b.var == a.var && b.positive != a.positive) return absorbing;
      }
    }
    std::string key(1, kind == Kind::And ? 'A' : 'O');
    for (FId c : cs) append(key, c);
    if (auto it = unique_.find(key); it != unique_.end()) return it->second;
    std::vector<Var> vars;
    for (FId c : cs) {
      std::vector<Var> merged;
      const auto& cv = nodes_[c].vars;
      std::set_union(vars.begin(), vars.end(), cv.begin(), cv.end(), std::back_inserter(merged));
      vars.swap(merged);
    }
    return insert(std::move(key), {kind, 0, true, std::move(cs), std::move(vars)});
  }

  FId import(const BoolFormula& f, std::unordered_map<const Formula*, FId>& memo) {
    if (auto it = memo.find(f.get()); it != memo.end()) return it->second;
    FId r = kFalse;
    switch (f->kind) {
      case Formula::Kind::False: r = kFalse; break;
      case Formula::Kind::True: r = kTrue; break;
      case Formula::Kind::Lit: r = lit(f->var, f->positive); break;
      case Formula::Kind::And:
      case Formula::Kind::Or: {
        std::vector<FId> cs;
        for (const auto& c : f->children) cs.push_back(import(c, memo));
        r = connective(f->kind == Formula::Kind::And ? Kind::And : Kind::Or, std::move(cs));
        break;
      }
    }
    memo.emplace(f.get(), r);
    return r;
  }

  /// f with variable v fixed to `value`.
  FId condition(FId f, Var v, bool value) {
    std::unordered_map<FId, FId> memo;
    return condition_rec(f, v, value, memo);
  }

 private:
  static void append(std::string& key, std::uint32_t x) {
    key.append(reinterpret_cast<const char*>(&x), sizeof x);
  }

  FId insert(std::string key, Node n) {
    const FId id = static_cast<FId>(nodes_.size());
    nodes_.push_back(std::move(n));
    unique_.emplace(std::move(key), id);
    return id;
  }

  FId condition_rec(FId f, Var v, bool value, std::unordered_map<FId, FId>& memo) {
    const Node& n = nodes_[f];
    if (!std::binary_search(n.vars.begin(), n.vars.end(), v)) return f;
    if (n.kind == Kind::Lit) return n.positive == value ? kTrue : kFalse;
    if (auto it = memo.find(f); it != memo.end()) return it->second;
    const Kind kind = n.kind;
    const std::vector<FId> children = n.children;  // nodes_ may grow below
    std::vector<FId> cs;
    cs.reserve(children.size());
    for (FId c : children) cs.push_back(condition_rec(c, v, value, memo));
    const FId r = connective(kind, std::move(cs));
    memo.emplace(f, r);
    return r;
  }

  std::vector<Node> nodes_;
  std::unordered_map<std::string, FId> unique_;
};

using MK = Manager::Kind;

class Builder {
 public:
  Builder() {
    add({DNode::Kind::False, 0, true, {}}, "F");
    add({DNode::Kind::True, 0, true, {}}, "T");
  }

  NodeId leaf(Var v, bool positive) {
    std::string key = "L" + std::to_string(v) + (positive ? "+" : "-");
    return add({DNode::Kind::Leaf, v, positive, {}}, key);
  }

  NodeId conj(std::vector<NodeId> in) {
    std::vector<NodeId> cs;
    for (NodeId c : in) {
      if (c == 0) return 0;
      if (c == 1) continue;
      if (dd_.nodes[c].kind == DNode::Kind::And)
        cs.insert(cs.end(), dd_.nodes[c].children.begin(), dd_.nodes[c].children.end());
      else
        cs.push_back(c);
    }
    if (cs.empty()) return 1;
    if (cs.size() == 1) return cs.front();
    std::sort(cs.begin(), cs.end());
    std::string key = "A";
    for (NodeId c : cs) key += ',' + std::to_string(c);
    return add({DNode::Kind::And, 0, true, std::move(cs)}, key);
  }

  NodeId decision(Var v, NodeId hi, NodeId lo) {
    std::string key = "O" + std::to_string(v) + ',' + std::to_string(hi) + ',' + std::to_string(lo);
    return add({DNode::Kind::Or, v, true, {hi, lo}}, key);
  }

  DDnnf finish(NodeId root) && {
    dd_.root = root;
    return std::move(dd_);
  }

 private:
  NodeId add(DNode n, const std::string& key) {
    if (auto it = unique_.find(key); it != unique_.end()) return it->second;
    const NodeId id = static_cast<NodeId>(dd_.nodes.size());
    dd_.nodes.push_back(std::move(n));
    unique_.emplace(key, id);
    return id;
  }

  DDnnf dd_;
  std::unordered_map<std::string, NodeId> unique_;
};

class Compiler {
 public:
  Compiler(Manager& m, const CompileOptions& opts, CompileStats& stats)
      : m_(m),
        opts_(opts),
        stats_(stats),
        deadline_(std::chrono::steady_clock::now() +
                  std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                      std::chrono::duration<double>(opts.time_budget_s))) {}

  NodeId run(FId f) {
    if (++calls_ % 256 == 0 && std::chrono::steady_clock::now() > deadline_)
      fail(Errc::Timeout, "compilation exceeded its time budget");
    if (f == kFalse) return 0;
    if (f == kTrue) return 1;
    const auto& n = m_.node(f);
    if (n.kind == MK::Lit) return b_.leaf(n.var, n.positive);
    if (opts_.cache) {
      if (auto it = cache_.find(f); it != cache_.end()) {
        ++stats_.cache_hits;
        return it->second;
      }
    }
    const NodeId r = n.kind == MK::And ? conjunction(f) : decide(f);
    if (opts_.cache) cache_.emplace(f, r);
    return r;
  }

  Builder& builder() { return b_; }

 private:
  NodeId conjunction(FId f) {
    const std::vector<FId> children = m_.node(f).children;
    std::vector<FId> units, rest;
    for (FId c : children) (m_.node(c).kind == MK::Lit ? units : rest).push_back(c);

    if (!units.empty()) {
      FId r = m_.connective(MK::And, rest);
      std::vector<NodeId> parts;
      for (FId u : units) {
        const Var v = m_.node(u).var;
        const bool pos = m_.node(u).positive;
        r = m_.condition(r, v, pos);
        parts.push_back(b_.leaf(v, pos));
      }
      parts.push_back(run(r));
      return b_.conj(std::move(parts));
    }

    // Union-find over children sharing variables.
    std::vector<std::size_t> parent(children.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    std::unordered_map<Var, std::size_t> owner;
    for (std::size_t i = 0; i < children.size(); ++i)
      for (Var v : m_.node(children[i]).vars) {
        auto [it, fresh] = owner.emplace(v, i);
        if (!fresh) parent[find(i)] = find(it->second);
      }
    std::map<std::size_t, std::vector<FId>> groups;
    for (std::size_t i = 0; i < children.size(); ++i) groups[find(i)].push_back(children[i]);
    if (groups.size() == 1) return decide(f);

    ++stats_.component_splits;
    std::vector<NodeId> parts;
    for (auto& [root, members] : groups) {
      const NodeId p = run(m_.connective(MK::And, std::move(members)));
      if (p == 0) return 0;
      parts.push_back(p);
    }
    return b_.conj(std::move(parts));
  }

  Var pick_variable(FId f) {
    std::unordered_map<Var, std::size_t> freq;
    std::vector<FId> stack{f};
    std::unordered_map<FId, bool> seen;
    while (!stack.empty()) {
      const FId g = stack.back();
      stack.pop_back();
      if (!seen.emplace(g, true).second) continue;
      for (FId c : m_.node(g).children) {
        const auto& cn = m_.node(c);
        if (cn.kind == MK::Lit)
          ++freq[cn.var];
        else
          stack.push_back(c);
      }
    }
    Var best = m_.node(f).vars.front();
    std::size_t best_count = 0;
    for (Var v : m_.node(f).vars) {
      const auto it = freq.find(v);
      const std::size_t cnt = it == freq.end() ? 0 : it->second;
      if (cnt > best_count) {
        best = v;
        best_count = cnt;
      }
    }
    return best;
  }

  NodeId decide(FId f) {
    ++stats_.decisions;
    const Var x = pick_variable(f);
    const FId fh = m_.condition(f, x, true);
    const FId fl = m_.condition(f, x, false);
    const NodeId hi = run(fh);
    const NodeId lo = run(fl);
    if (hi == 0 && lo == 0) return 0;
    const NodeId hb = hi == 0 ? 0 : b_.conj({b_.leaf(x, true), hi});
    const NodeId lb = lo == 0 ? 0 : b_.conj({b_.leaf(x, false), lo});
    if (hb == 0) return lb;
    if (lb == 0) return hb;
    return b_.decision(x, hb, lb);
  }

  Manager& m_;
  const CompileOptions& opts_;
  CompileStats& stats_;
  std::chrono::steady_clock::time_point deadline_;
  Builder b_;
  std::unordered_map<FId, NodeId> cache_;
  std::size_t calls_ = 0;
};

}  // namespace

DDnnf compile(const BoolFormula& f, const CompileOptions& opts, CompileStats* stats) {
  const auto vars = variables(f);
  if (vars.size() > opts.var_limit)
    fail(Errc::VarLimitExceeded, std::to_string(vars.size()) + " variables exceed the limit of " +
                                     std::to_string(opts.var_limit));
  Manager m;
  std::unordered_map<const Formula*, FId> memo;
  const FId root = m.import(f, memo);
  CompileStats local;
  Compiler c(m, opts, stats ? *stats : local);
  const NodeId r = c.run(root);
  return std::move(c.builder()).finish(r);
}

std::shared_ptr<const DDnnf> CircuitCache::get_or_compile(const BoolFormula& f, const CompileOptions& opts) {
  std::string key = to_string(f);
  {
    std::lock_guard lock(mu_);
    if (auto it = map_.find(key); it != map_.end()) {
      ++hits_;
      return it->second;
    }
  }
  auto c = std::make_shared<const DDnnf>(compile(f, opts));
  std::lock_guard lock(mu_);
  map_[std::move(key)] = c;
  return c;
}

std::size_t CircuitCache::hits() const {
  std::lock_guard lock(mu_);
  return hits_;
}

std::size_t CircuitCache::size() const {
  std::lock_guard lock(mu_);
  return map_.size();
}

}  // namespace probkg::circuits
