#include "probkg/oracle/oracle.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "probkg/dist/measures.hpp"
#include "probkg/query/evaluator.hpp"
#include "probkg/query/results.hpp"
#include "probkg/util/error.hpp"
#include "probkg/util/parallel.hpp"

namespace probkg::oracle {

namespace {

// Neumaier compensated sum.
struct Sum {
  double s = 0.0;
  double c = 0.0;
  void add(double x) {
    const double t = s + x;
    c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
    s = t;
  }
  double value() const { return s + c; }
};

struct Partial {
  std::map<std::string, std::pair<std::vector<std::string>, Sum>> answers;
  Sum total;
};

// Shared driver: `fill(world_index, mask)` sets the world's triples and
// returns its weight.
template <class Fill>
WorldReport enumerate(const kg::Graph& g, const query::QueryAst& ast, std::size_t bits, Fill fill) {
  if (bits > kMaxUncertain)
    fail(Errc::TooManyWorlds, std::to_string(bits) + " uncertain triples exceed the limit of " +
                                  std::to_string(kMaxUncertain));
  const auto plan = query::plan(ast, g);
  const std::uint64_t worlds = std::uint64_t{1} << bits;
  const std::size_t chunks = std::min<std::size_t>(thread_count(), worlds);
  std::vector<Partial> parts(chunks);
  parallel_chunks(worlds, chunks, [&](std::size_t c, std::size_t b, std::size_t e) {
    std::vector<char> mask(g.size(), 1);
    query::EvalOptions eo;
    eo.lineage = false;
    eo.world = &mask;
    auto& part = parts[c];
    for (std::size_t w = b; w < e; ++w) {
      const double weight = fill(w, mask);
      part.total.add(weight);
      if (weight == 0.0) continue;
      const auto rs = query::evaluate(plan, g, eo);
      for (const auto& a : query::distinct_answers(rs)) {
        auto key = query::answer_key(rs.vars, a.vals, *rs.terms);
        auto [it, fresh] = part.answers.try_emplace(std::move(key));
        if (fresh)
          for (auto v : a.vals) it->second.first.push_back(v == kg::kNoTerm ? "" : kg::display_value(rs.terms->term(v)));
        it->second.second.add(weight);
      }
    }
  });
  WorldReport out;
  out.vars = plan.select;
  out.worlds_evaluated = worlds;
  Sum total;
  std::map<std::string, Sum> sums;
  for (auto& part : parts) {
    total.add(part.total.value());
    for (auto& [key, entry] : part.answers) {
      sums[key].add(entry.second.value());
      out.answers[key].bindings = entry.first;
    }
  }
  for (auto& [key, s] : sums) out.answers[key].probability = std::clamp(s.value(), 0.0, 1.0);
  out.total_weight = total.value();
  return out;
}

}  // namespace

WorldReport enumerate_worlds(const kg::Graph& g, const query::QueryAst& ast) {
  std::vector<kg::TripleId> uncertain;
  for (kg::TripleId t = 0; t < g.size(); ++t)
    if (g.triple(t).p_exist < 1.0) uncertain.push_back(t);
  return enumerate(g, ast, uncertain.size(), [&](std::uint64_t w, std::vector<char>& mask) {
    double weight = 1.0;
    for (std::size_t i = 0; i < uncertain.size(); ++i) {
      const bool present = (w >> i) & 1;
      const double p = g.triple(uncertain[i]).p_exist;
      mask[uncertain[i]] = present;
      weight *= present ? p : 1.0 - p;
    }
    return weight;
  });
}

WorldReport enumerate_worlds(const kg::Graph& g, const query::QueryAst& ast, const circuits::BayesNet& bn) {
  circuits::validate(bn, g);
  std::vector<char> linked(g.size(), 0);
  for (const auto& n : bn.nodes)
    if (n.triple) linked[*n.triple] = 1;
  std::vector<kg::TripleId> free;
  for (kg::TripleId t = 0; t < g.size(); ++t)
    if (!linked[t] && g.triple(t).p_exist < 1.0) free.push_back(t);
  const std::size_t m = bn.nodes.size();
  return enumerate(g, ast, m + free.size(), [&](std::uint64_t w, std::vector<char>& mask) {
    std::map<std::size_t, bool> assignment;
    for (std::size_t i = 0; i < m; ++i) {
      const bool v = (w >> i) & 1;
      assignment[i] = v;
      if (bn.nodes[i].triple) mask[*bn.nodes[i].triple] = v;
    }
    double weight = bn_joint(bn, assignment);
    for (std::size_t i = 0; i < free.size(); ++i) {
      const bool present = (w >> (m + i)) & 1;
      const double p = g.triple(free[i]).p_exist;
      mask[free[i]] = present;
      weight *= present ? p : 1.0 - p;
    }
    return weight;
  });
}

double quad_jsd(const dist::Distribution& a, const dist::Distribution& b) {
  std::vector<double> cuts;
  for (const auto* d : {&a, &b}) {
    if (dist::dimension(*d) != 1) fail(Errc::DimensionMismatch, "quad_jsd needs 1-d distributions");
    if (const auto* g = std::get_if<dist::Gmm>(d)) {
      for (const auto& c : g->components) {
        const double s = std::sqrt(c.var[0]);
        for (double k : {-10.0, -6.0, -3.0, -1.0, 0.0, 1.0, 3.0, 6.0, 10.0}) cuts.push_back(c.mean[0] + k * s);
      }
    } else if (const auto* h = std::get_if<dist::Histogram>(d)) {
      cuts.insert(cuts.end(), h->edges.begin(), h->edges.end());
    } else {
      fail(Errc::UnsupportedFamily, "quad_jsd supports Gmm and Histogram");
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  auto f = [&](double x) {
    const double p = dist::pdf(a, x);
    const double q = dist::pdf(b, x);
    const double m = p + q;
    double v = 0.0;
    if (p > 0.0) v += p * std::log(2.0 * p / m);
    if (q > 0.0) v += q * std::log(2.0 * q / m);
    return 0.5 * v;
  };
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += GK::integrate(f, cuts[i], cuts[i + 1], 15, 1e-12);
  return std::clamp(total, 0.0, std::log(2.0));
}

double bn_joint(const circuits::BayesNet& bn, const std::map<std::size_t, bool>& assignment) {
  double p = 1.0;
  for (std::size_t i = 0; i < bn.nodes.size(); ++i) {
    if (!assignment.count(i)) throw Error(Errc::IncompleteAssignment, "no value for node " + bn.nodes[i].name);
    const auto& node = bn.nodes[i];
    std::size_t row = 0;
    for (std::size_t j = 0; j < node.parents.size(); ++j)
      if (assignment.at(node.parents[j])) row |= std::size_t{1} << j;
    p *= node.cpt.at(row)[assignment.at(i) ? 1 : 0];
  }
  return p;
}

}  // namespace probkg::oracle
