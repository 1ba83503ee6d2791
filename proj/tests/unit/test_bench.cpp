#include <filesystem>
#include <fstream>
#include <functional>

#include "doctest.h"
#include "json.hpp"
#include "probkg/bench/generator.hpp"
#include "probkg/bench/suite.hpp"
#include "probkg/dist/measures.hpp"
#include "probkg/kg/pkg_format.hpp"
#include "probkg/util/error.hpp"

using namespace probkg;
using namespace probkg::bench;

TEST_CASE("generator contracts") {
  GenConfig cfg;
  cfg.n_triples = 100;
  const auto d = generate(cfg);
  CHECK(d.graph.size() == 100);
  CHECK(d.twin.size() == 100);
  CHECK(d.graph.stats().uncertain_triples == 0);
  CHECK(d.graph.stats().dist_literals == 100);
  for (kg::TripleId t = 0; t < d.graph.size(); ++t) {
    const auto& a = d.graph.triple(t);
    const auto& b = d.twin.triple(t);
    CHECK(d.graph.term(a.s) == d.twin.term(b.s));
    CHECK(d.graph.term(a.p) == d.twin.term(b.p));
    const auto* dist = d.graph.distribution(a.o);
    REQUIRE(dist);
    const auto v = kg::numeric_value(d.twin.term(b.o));
    REQUIRE(v);
    CHECK(*v == dist::moments(*dist).mean[0]);
    CHECK(b.p_exist == 1.0);
  }
}

TEST_CASE("generator options") {
  GenConfig cfg;
  cfg.n_triples = 1000;
  cfg.k_components = 5;
  cfg.frac_uncertain = 0.3;
  cfg.seed = 9;
  const auto a = generate(cfg);
  CHECK(a.graph.stats().dist_literals == 1000);
  // Each triple is uncertain with probability 0.3.
  CHECK(a.graph.stats().uncertain_triples > 240);
  CHECK(a.graph.stats().uncertain_triples < 360);
  CHECK(a.twin.stats().uncertain_triples == 0);
  for (kg::TripleId t = 0; t < 20; ++t) {
    const auto* d = a.graph.distribution(a.graph.triple(t).o);
    REQUIRE(d);
    CHECK(std::get<dist::Gmm>(*d).size() == 5);
  }
  const auto b = generate(cfg);
  CHECK(kg::serialize_graph(a.graph) == kg::serialize_graph(b.graph));
  CHECK(kg::serialize_graph(a.twin) == kg::serialize_graph(b.twin));
  cfg.seed = 10;
  CHECK(kg::serialize_graph(generate(cfg).graph) != kg::serialize_graph(a.graph));
  cfg.n_triples = 0;
  CHECK_THROWS_AS(generate(cfg), Error);
}

TEST_CASE("a small suite") {
  const auto suite = R"({
    "datasets": [{"name": "small", "n_triples": 400, "n_entities": 40, "frac_uncertain": 0.2, "seed": 3},
                 {"name": "clusters", "n_triples": 60, "n_entities": 60, "n_predicates": 1, "cluster_count": 2, "seed": 4}],
    "queries": [
      {"name": "filter", "dataset": "small",
       "text": "SELECT ?e WHERE { ?e <urn:p0> ?v . ?e <urn:p1> ?w . FILTER(PGT(?v, 60) >= 0.5) }",
       "twin_text": "SELECT ?e WHERE { ?e <urn:p0> ?v . ?e <urn:p1> ?w . FILTER(?v > 60) }"},
      {"name": "simjoin", "dataset": "clusters",
       "text": "SELECT ?a ?b WHERE { ?a <urn:p0> ?p . ?b <urn:p0> ?q . SIMJOIN(?p, ?q, JSD, 0.05) }"}
    ],
    "variants": {"pushdown": [true, false], "simjoin": ["dedicated", "naive"], "sampling": ["naive", "sprt"], "twin": true},
    "runs": 3, "warmups": 1, "seed": 42
  })";
  const auto r = run_suite(suite);
  REQUIRE(r.queries.size() == 2);
  CHECK(r.consistent());
  const auto& f = r.queries[0];
  CHECK(f.pushdown_speedup.has_value());
  CHECK(f.overhead_ratio.has_value());
  CHECK_FALSE(f.simjoin_speedup.has_value());
  bool saw_sampling = false;
  for (const auto& v : f.variants) {
    CHECK(v.ns.size() == 3);
    if (v.sampling != "closed") {
      saw_sampling = true;
      CHECK_FALSE(v.gated);
      REQUIRE(v.error.has_value());
      CHECK(*v.error >= 0.0);
    }
  }
  CHECK(saw_sampling);
  const auto& s = r.queries[1];
  CHECK(s.simjoin_speedup.has_value());
  for (const auto& v : s.variants)
    if (v.simjoin == "dedicated") CHECK(v.simjoin_stats.candidates == 60u * 60u);

  CHECK(run_suite(suite).to_json(false) == r.to_json(false));
  const auto j = nlohmann::json::parse(r.to_json());
  CHECK(j.contains("queries"));
  const auto csv = r.to_csv();
  CHECK(csv.substr(0, csv.find('\n')).find("median_ns") != std::string::npos);
}

TEST_CASE("suite files write reports") {
  const auto dir = std::filesystem::temp_directory_path() / "probkg_suite_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "g.pkg") << "<urn:a> <urn:p> \"gmm(1:N(80,1))\"^^<urn:prob:dist> .\n";
    std::ofstream(dir / "suite.json") << R"({"datasets":[{"name":"g","file":"g.pkg"}],
      "queries":[{"name":"q","dataset":"g","text":"SELECT ?a WHERE { ?a <urn:p> ?t . FILTER(PGT(?t, 78) >= 0.9) }"}],
      "variants":{"pushdown":[true,false]},"runs":1,"warmups":0})";
  }
  const auto r = run_suite_file((dir / "suite.json").string(), (dir / "out").string());
  CHECK(r.queries.at(0).variants.at(0).results == 1);
  CHECK(std::filesystem::exists(dir / "out" / "report.json"));
  CHECK(std::filesystem::exists(dir / "out" / "report.csv"));
  std::filesystem::remove_all(dir);
}
