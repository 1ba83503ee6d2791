#pragma once

#include <string>
#include <vector>

#include "probkg/circuits/bayesnet.hpp"
#include "probkg/circuits/compiler.hpp"
#include "probkg/circuits/safe_plan.hpp"
#include "probkg/query/results.hpp"

namespace probkg::circuits {

/// (P(t), 1 - P(t)) for each triple variable; `probs` overrides P.
Weights tid_weights(const std::vector<Var>& vars, const kg::Graph& g, const std::vector<double>* probs = nullptr);

/// wmc(compile(to_boolean(lineage))) under tuple-independent weights.
double answer_probability(const prov::Lineage& lineage, const kg::Graph& g, const CompileOptions& copts = {},
                          CircuitCache* cache = nullptr, const std::vector<double>* probs = nullptr);

/// Joint lineage and network inference. Triples bound to a network node take
/// their distribution from the network through x_t <-> lambda(node = true);
/// every other triple stays independent.
double answer_probability_bn(const prov::Lineage& lineage, const kg::Graph& g, const BayesNet& bn,
                             const CompileOptions& copts = {});

enum class Method { Auto, Lifted, Compiled };

struct InferOptions {
  Method method = Method::Auto;
  query::PlanOptions plan;
  CompileOptions compile;
  CircuitCache* cache = nullptr;
  const std::vector<double>* probs = nullptr;
  /// When set, triples bound to nodes are correlated through the network and
  /// the compiled path is always used.
  const BayesNet* bn = nullptr;
};

struct Inference {
  query::ResultSet results;
  /// Distinct answers with probabilities.
  std::vector<query::Answer> answers;
  /// "lifted" or "compiled".
  std::string method;
  SafePlan safe;
};

/// Lifted evaluation when the query is safe (Auto) or forced (Lifted, which
/// throws InvalidArgument on an unsafe query), compilation otherwise.
Inference infer(const query::QueryAst& ast, const kg::Graph& g, const InferOptions& opts = {});

}  // namespace probkg::circuits
