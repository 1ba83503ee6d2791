#pragma once

#include <cstdint>

#include "probkg/kg/graph.hpp"

namespace probkg::bench {

struct GenConfig {
  std::size_t n_triples = 1000;
  /// Mixture components per literal.
  std::size_t k_components = 1;
  double frac_uncertain = 0.0;
  std::size_t n_entities = 100;
  std::size_t n_predicates = 4;
  /// 0: means uniform on [0, 100]. Otherwise entity i draws its means around
  /// the centre of cluster i mod cluster_count.
  std::size_t cluster_count = 0;
  std::uint64_t seed = 42;
};

struct Dataset {
  kg::Graph graph;
  kg::Graph twin;
};

/// Triple i is (e_{i mod n_entities}, p_{(i / n_entities) mod n_predicates},
/// GMM literal). Weights are normalised uniforms, means uniform on [0, 100]
/// (or cluster centre +- 10), variances uniform on [0.5, 5]. Uncertain triples
/// draw p uniformly from [0.05, 0.95]. Throws InvalidArgument on bad counts.
Dataset generate(const GenConfig& cfg);

/// Same structure with each distribution literal replaced by its mean as an
/// xsd:double and every probability set to 1.
kg::Graph make_twin(const kg::Graph& g);

}  // namespace probkg::bench
