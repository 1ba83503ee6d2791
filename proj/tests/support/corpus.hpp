#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "probkg/circuits/bayesnet.hpp"
#include "probkg/kg/graph.hpp"

namespace probkg::testing {

struct CorpusCase {
  std::string name;
  std::string graph_text;
  std::string query;
};

/// Small graphs over predicates p, q, r, val (at most 20 uncertain triples)
/// crossed with a fixed set of query shapes.
std::vector<CorpusCase> triple_corpus();

/// Random graph text: `n` distinct triples over `entities` entities and the
/// predicates p, q, r; `uncertain` of them carry a probability below 1.
std::string random_graph(std::uint64_t seed, std::size_t n, std::size_t uncertain, std::size_t entities = 5);

/// Random Boolean network with `n` nodes and at most `max_parents` parents
/// per node, parents drawn among earlier nodes.
circuits::BayesNet random_network(std::uint64_t seed, std::size_t n, std::size_t max_parents = 2);

struct BnCase {
  std::string name;
  std::string graph_text;
  std::string query;
  circuits::BayesNet bn;
};

/// Graph, query and network fixtures with network-bound triples.
std::vector<BnCase> bn_corpus();

/// Distribution graphs with SIMJOIN queries.
std::vector<CorpusCase> simjoin_corpus();

/// Two tight clusters of 50 one-dimensional mixtures each.
std::string two_cluster_graph(std::uint64_t seed);

}  // namespace probkg::testing
