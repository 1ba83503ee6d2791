#include "probkg/bench/generator.hpp"

#include <string>

#include "probkg/dist/measures.hpp"
#include "probkg/mc/rng.hpp"
#include "probkg/util/error.hpp"

namespace probkg::bench {

namespace {

struct Draw {
  kg::Term object;
  double p;
};

Draw draw_triple(const GenConfig& cfg, std::size_t i) {
  mc::CounterRng rng(mc::derive_stream(cfg.seed, mc::StreamTag::Generate, i));
  const std::size_t k = cfg.k_components;
  std::vector<double> w(k);
  double total = 0.0;
  for (auto& x : w) total += x = 0.5 + rng.uniform();
  for (auto& x : w) x /= total;
  const double centre = cfg.cluster_count
                            ? 100.0 * (static_cast<double>(i % cfg.n_entities % cfg.cluster_count) + 0.5) /
                                  static_cast<double>(cfg.cluster_count)
                            : 0.0;
  std::vector<dist::Gaussian> comps;
  for (std::size_t c = 0; c < k; ++c) {
    const double mean = cfg.cluster_count ? centre - 10.0 + 20.0 * rng.uniform() : 100.0 * rng.uniform();
    comps.push_back({{mean}, {0.5 + 4.5 * rng.uniform()}});
  }
  const double u = rng.uniform();
  const double p = u < cfg.frac_uncertain ? 0.05 + 0.9 * rng.uniform() : 1.0;
  return {kg::make_dist(dist::make_gmm(std::move(w), std::move(comps))), p};
}

}  // namespace

Dataset generate(const GenConfig& cfg) {
  if (cfg.n_triples == 0 || cfg.n_entities == 0 || cfg.n_predicates == 0 || cfg.k_components == 0)
    fail(Errc::InvalidArgument, "generator counts must be at least 1");
  if (!(cfg.frac_uncertain >= 0.0 && cfg.frac_uncertain <= 1.0))
    fail(Errc::InvalidArgument, "frac_uncertain must lie in [0, 1]");
  std::vector<kg::Term> entities, predicates;
  for (std::size_t e = 0; e < cfg.n_entities; ++e) entities.push_back(kg::make_iri("urn:e" + std::to_string(e)));
  for (std::size_t p = 0; p < cfg.n_predicates; ++p) predicates.push_back(kg::make_iri("urn:p" + std::to_string(p)));
  kg::Graph::Builder b;
  for (std::size_t i = 0; i < cfg.n_triples; ++i) {
    const auto d = draw_triple(cfg, i);
    b.add(entities[i % cfg.n_entities], predicates[(i / cfg.n_entities) % cfg.n_predicates], d.object, d.p, i + 1);
  }
  Dataset out;
  out.graph = std::move(b).build();
  out.twin = make_twin(out.graph);
  return out;
}

kg::Graph make_twin(const kg::Graph& g) {
  kg::Graph::Builder b;
  for (const auto& t : g.triples()) {
    kg::Term o = g.term(t.o);
    if (const auto* d = kg::distribution_of(o)) o = kg::make_number(dist::moments(*d).mean.at(0));
    b.add(g.term(t.s), g.term(t.p), o, 1.0);
  }
  return std::move(b).build();
}

}  // namespace probkg::bench
