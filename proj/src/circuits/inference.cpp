#include "probkg/circuits/inference.hpp"

#include <algorithm>

#include "probkg/util/error.hpp"
#include "probkg/util/parallel.hpp"

namespace probkg::circuits {

Weights tid_weights(const std::vector<Var>& vars, const kg::Graph& g, const std::vector<double>* probs) {
  Weights w;
  for (Var v : vars) {
    if (v >= g.size()) fail(Errc::MissingWeight, "no triple for variable x" + std::to_string(v));
    const double p = probs ? (*probs)[v] : g.triple(v).p_exist;
    w[v] = {p, 1.0 - p};
  }
  return w;
}

double answer_probability(const prov::Lineage& lineage, const kg::Graph& g, const CompileOptions& copts,
                          CircuitCache* cache, const std::vector<double>* probs) {
  const auto f = prov::to_boolean(lineage);
  const auto w = tid_weights(variables(f), g, probs);
  if (cache) return wmc(*cache->get_or_compile(f, copts), w);
  return wmc(compile(f, copts), w);
}

double answer_probability_bn(const prov::Lineage& lineage, const kg::Graph& g, const BayesNet& bn,
                             const CompileOptions& copts) {
  validate(bn, g);
  const auto f = prov::to_boolean(lineage);
  const Var base = static_cast<Var>(g.size());
  const auto enc = bn_to_cnf(bn, base);
  std::vector<BoolFormula> parts{f, cnf_to_formula(enc.cnf)};
  std::vector<char> linked(g.size(), 0);
  for (std::size_t i = 0; i < bn.nodes.size(); ++i) {
    const auto& t = bn.nodes[i].triple;
    if (!t) continue;
    linked[*t] = 1;
    const Var lam = enc.indicator[i][1];
    parts.push_back(f_or({f_lit(*t, false), f_lit(lam)}));
    parts.push_back(f_or({f_lit(*t), f_lit(lam, false)}));
  }
  Weights w = enc.cnf.weights;
  for (Var v : variables(f))
    if (!linked[v]) w[v] = {g.triple(v).p_exist, 1.0 - g.triple(v).p_exist};
  for (std::size_t t = 0; t < g.size(); ++t)
    if (linked[t]) w[static_cast<Var>(t)] = {1.0, 1.0};
  return wmc(compile(f_and(std::move(parts)), copts), w);
}

Inference infer(const query::QueryAst& ast, const kg::Graph& g, const InferOptions& opts) {
  Inference out;
  if (opts.method != Method::Compiled && !opts.bn) out.safe = safe_plan(ast);
  if (opts.method == Method::Lifted && !out.safe.safe)
    fail(Errc::InvalidArgument, "query is not safe: " + (opts.bn ? std::string("network correlations") : out.safe.reason));
  const bool lifted = out.safe.safe;
  out.method = lifted ? "lifted" : "compiled";

  query::EvalOptions eo;
  eo.lineage = !lifted;
  out.results = query::evaluate(query::plan(ast, g, opts.plan), g, eo);
  out.answers = query::distinct_answers(out.results);

  auto& answers = out.answers;
  parallel_chunks(answers.size(), thread_count(), [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      auto& a = answers[i];
      if (lifted)
        a.probability = lifted_probability(out.safe, g, a.vals, opts.probs);
      else if (opts.bn)
        a.probability = answer_probability_bn(a.lineage, g, *opts.bn, opts.compile);
      else
        a.probability = answer_probability(a.lineage, g, opts.compile, opts.cache, opts.probs);
    }
  });
  return out;
}

}  // namespace probkg::circuits
