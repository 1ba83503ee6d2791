#include "probkg/circuits/bayesnet.hpp"

#include <cmath>
#include "json.hpp"

#include "probkg/circuits/compiler.hpp"
#include "probkg/util/error.hpp"

namespace probkg::circuits {

std::vector<std::size_t> topo_order(const BayesNet& bn) {
  const std::size_t n = bn.nodes.size();
  std::vector<std::size_t> indeg(n, 0);
  std::vector<std::vector<std::size_t>> kids(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t p : bn.nodes[i].parents) {
      if (p >= n) fail(Errc::MalformedCpt, "node " + bn.nodes[i].name + " has an unknown parent");
      kids[p].push_back(i);
      ++indeg[i];
    }
  std::vector<std::size_t> order;
  std::vector<char> done(n, 0);
  // Smallest ready index first keeps the order stable.
  while (order.size() < n) {
    std::size_t pick = n;
    for (std::size_t i = 0; i < n; ++i)
      if (!done[i] && indeg[i] == 0) {
        pick = i;
        break;
      }
    if (pick == n) fail(Errc::CyclicNetwork, "the network has a directed cycle");
    done[pick] = 1;
    order.push_back(pick);
    for (std::size_t k : kids[pick]) --indeg[k];
  }
  return order;
}

void validate(const BayesNet& bn) {
  for (const auto& node : bn.nodes) {
    if (node.parents.size() > 20) fail(Errc::MalformedCpt, node.name + ": too many parents");
    if (node.cpt.size() != (std::size_t{1} << node.parents.size()))
      fail(Errc::MalformedCpt, node.name + ": expected " + std::to_string(1u << node.parents.size()) + " CPT rows");
    for (const auto& row : node.cpt) {
      if (!(row[0] >= 0.0 && row[1] >= 0.0) || std::abs(row[0] + row[1] - 1.0) > 1e-12)
        fail(Errc::MalformedCpt, node.name + ": CPT row does not sum to 1");
    }
  }
  topo_order(bn);
}

void validate(const BayesNet& bn, const kg::Graph& g) {
  validate(bn);
  for (const auto& node : bn.nodes)
    if (node.triple && *node.triple >= g.size())
      fail(Errc::InvalidArgument, node.name + ": bound triple " + std::to_string(*node.triple) + " does not exist");
}

BayesNet parse_bayesnet(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::InvalidArgument, std::string("bayes net JSON: ") + e.what());
  }
  BayesNet bn;
  std::map<std::string, std::size_t> index;
  try {
    const auto& nodes = j.at("nodes");
    for (const auto& n : nodes) {
      const auto name = n.at("name").get<std::string>();
      if (!index.emplace(name, bn.nodes.size()).second) fail(Errc::MalformedCpt, "duplicate node " + name);
      bn.nodes.push_back({name, {}, {}, std::nullopt});
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const auto& n = nodes[i];
      auto& node = bn.nodes[i];
      if (n.contains("parents"))
        for (const auto& p : n["parents"]) {
          auto it = index.find(p.get<std::string>());
          if (it == index.end()) fail(Errc::MalformedCpt, node.name + ": unknown parent " + p.get<std::string>());
          node.parents.push_back(it->second);
        }
      for (const auto& row : n.at("cpt")) {
        if (row.size() != 2) fail(Errc::MalformedCpt, node.name + ": CPT rows have two entries");
        node.cpt.push_back({row[0].get<double>(), row[1].get<double>()});
      }
      if (n.contains("triple") && !n["triple"].is_null()) node.triple = n["triple"].get<kg::TripleId>();
    }
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::InvalidArgument, std::string("bayes net JSON: ") + e.what());
  }
  validate(bn);
  return bn;
}

BnEncoding bn_to_cnf(const BayesNet& bn, Var base) {
  validate(bn);
  BnEncoding enc;
  auto& cnf = enc.cnf;
  Var next = base;
  for (std::size_t i = 0; i < bn.nodes.size(); ++i) {
    enc.indicator.push_back({next, next + 1});
    cnf.weights[next] = {1.0, 1.0};
    cnf.weights[next + 1] = {1.0, 1.0};
    const int f = static_cast<int>(next), t = static_cast<int>(next + 1);
    cnf.clauses.push_back({f, t});
    cnf.clauses.push_back({-f, -t});
    next += 2;
  }
  for (std::size_t i = 0; i < bn.nodes.size(); ++i) {
    const auto& node = bn.nodes[i];
    for (std::size_t r = 0; r < node.cpt.size(); ++r)
      for (int v = 0; v < 2; ++v) {
        const Var theta = next++;
        cnf.weights[theta] = {node.cpt[r][v], 1.0};
        // context = lambda(X=v) and lambda(U_j = bit j of r)
        std::vector<int> context{static_cast<int>(enc.indicator[i][v])};
        for (std::size_t j = 0; j < node.parents.size(); ++j)
          context.push_back(static_cast<int>(enc.indicator[node.parents[j]][(r >> j) & 1]));
        std::vector<int> back{static_cast<int>(theta)};
        for (int c : context) {
          cnf.clauses.push_back({-static_cast<int>(theta), c});
          back.push_back(-c);
        }
        cnf.clauses.push_back(std::move(back));
      }
  }
  cnf.num_vars = next - 1;
  return enc;
}

BoolFormula cnf_to_formula(const Cnf& cnf) {
  std::vector<BoolFormula> clauses;
  clauses.reserve(cnf.clauses.size());
  for (const auto& c : cnf.clauses) {
    std::vector<BoolFormula> lits;
    for (int l : c) lits.push_back(f_lit(static_cast<Var>(std::abs(l)), l > 0));
    clauses.push_back(f_or(std::move(lits)));
  }
  return f_and(std::move(clauses));
}

double bn_probability(const BayesNet& bn, const std::map<std::size_t, bool>& evidence) {
  const auto enc = bn_to_cnf(bn);
  std::vector<BoolFormula> parts{cnf_to_formula(enc.cnf)};
  for (auto [node, value] : evidence) {
    if (node >= bn.nodes.size()) fail(Errc::InvalidArgument, "evidence on unknown node");
    parts.push_back(f_lit(enc.indicator[node][value ? 1 : 0]));
  }
  return wmc(compile(f_and(std::move(parts))), enc.cnf.weights);
}

}  // namespace probkg::circuits
