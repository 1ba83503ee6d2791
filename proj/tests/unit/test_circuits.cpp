#include <cmath>
#include <functional>

#include "doctest.h"
#include "probkg/circuits/bayesnet.hpp"
#include "probkg/circuits/compiler.hpp"
#include "probkg/circuits/dimacs.hpp"
#include "probkg/circuits/inference.hpp"
#include "probkg/circuits/safe_plan.hpp"
#include "probkg/kg/pkg_format.hpp"
#include "probkg/mc/rng.hpp"
#include "probkg/oracle/oracle.hpp"
#include "probkg/query/parser.hpp"
#include "probkg/util/error.hpp"

using namespace probkg;
using namespace probkg::circuits;

namespace {

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::InvalidArgument;
}

// Satisfying assignments over variables 1..n as bitmasks.
std::vector<unsigned> models(const std::function<bool(const std::function<bool(Var)>&)>& eval, unsigned n) {
  std::vector<unsigned> out;
  for (unsigned m = 0; m < (1u << n); ++m)
    if (eval([&](Var v) { return ((m >> (v - 1)) & 1u) != 0; })) out.push_back(m);
  return out;
}

BoolFormula random_formula(mc::CounterRng& rng, unsigned vars, int depth) {
  if (depth == 0 || rng() % 4 == 0) return f_lit(1 + rng() % vars, rng() % 3 != 0);
  std::vector<BoolFormula> kids;
  const int k = 2 + static_cast<int>(rng() % 3);
  for (int i = 0; i < k; ++i) kids.push_back(random_formula(rng, vars, depth - 1));
  return rng() % 2 ? f_and(std::move(kids)) : f_or(std::move(kids));
}

Weights uniform_weights(const std::vector<Var>& vs, double p) {
  Weights w;
  for (Var v : vs) w[v] = {p, 1 - p};
  return w;
}

}  // namespace

TEST_CASE("compile examples") {
  SUBCASE("a lone literal is a leaf") {
    const auto c = compile(f_lit(1));
    CHECK(c.nodes[c.root].kind == DNode::Kind::Leaf);
    CHECK(c.nodes[c.root].var == 1);
  }
  SUBCASE("x1 | x2 decides on x1") {
    const auto f = parse_formula("x1 | x2");
    const auto c = compile(f);
    CHECK(verify_circuit(c).ok);
    const auto& root = c.nodes[c.root];
    REQUIRE(root.kind == DNode::Kind::Or);
    CHECK(root.var == 1);
    CHECK(models([&](auto v) { return circuit_evaluate(c, v); }, 2) ==
          models([&](auto v) { return evaluate(f, v); }, 2));
  }
  SUBCASE("(x1 & x2) | (x1 & x3) has 3 of 8 models") {
    const auto c = compile(parse_formula("x1 & x2 | x1 & x3"));
    CHECK(models([&](auto v) { return circuit_evaluate(c, v); }, 3).size() == 3);
    Weights half;
    for (Var v = 1; v <= 3; ++v) half[v] = {1, 1};
    CHECK(wmc(c, half) == doctest::Approx(3.0));
  }
}

TEST_CASE("wmc examples") {
  CHECK(wmc(compile(f_lit(1)), {{1, {0.12, 0.88}}}) == doctest::Approx(0.12).epsilon(1e-15));
  CHECK(wmc(compile(parse_formula("x1 | x2")), uniform_weights({1, 2}, 0.5)) == doctest::Approx(0.75));
  CHECK(wmc(compile(parse_formula("x1 & !x2")), {{1, {0.8, 0.2}}, {2, {0.3, 0.7}}}) == doctest::Approx(0.56));
  CHECK(code_of([] { (void)wmc(compile(parse_formula("x1 & x2")), {{1, {0.5, 0.5}}}); }) == Errc::MissingWeight);
  // Variables outside the circuit are smoothed.
  CHECK(wmc(compile(f_lit(1)), {{1, {0.12, 0.88}}, {2, {0.4, 0.6}}}) == doctest::Approx(0.12));
}

TEST_CASE("verify_circuit finds violations") {
  DDnnf shared;
  shared.nodes = {{DNode::Kind::Leaf, 1, true, {}}, {DNode::Kind::Leaf, 2, true, {}},
                  {DNode::Kind::Leaf, 1, false, {}}, {DNode::Kind::And, 0, true, {0, 1}},
                  {DNode::Kind::And, 0, true, {3, 2}}};
  shared.root = 4;
  auto r = verify_circuit(shared);
  CHECK_FALSE(r.ok);
  REQUIRE(r.node);
  CHECK(*r.node == 4);
  CHECK(r.violation.find("decomposab") != std::string::npos);

  DDnnf undecided;
  undecided.nodes = {{DNode::Kind::Leaf, 1, true, {}}, {DNode::Kind::Leaf, 2, true, {}},
                     {DNode::Kind::Or, 1, true, {0, 1}}};
  undecided.root = 2;
  r = verify_circuit(undecided);
  CHECK_FALSE(r.ok);
  REQUIRE(r.node);
  CHECK(*r.node == 2);
  CHECK(r.violation.find("determinism") != std::string::npos);
}

TEST_CASE("compiled circuits match their formulas") {
  mc::CounterRng rng(mc::derive_stream(5, mc::StreamTag::Corpus, 0));
  for (int i = 0; i < 200; ++i) {
    const auto f = random_formula(rng, 6, 3);
    const auto c = compile(f);
    CHECK(verify_circuit(c).ok);
    CHECK(models([&](auto v) { return circuit_evaluate(c, v); }, 6) ==
          models([&](auto v) { return evaluate(f, v); }, 6));
  }
}

TEST_CASE("cache on and off agree") {
  mc::CounterRng rng(mc::derive_stream(6, mc::StreamTag::Corpus, 0));
  CompileOptions off;
  off.cache = false;
  std::size_t hits = 0;
  for (int i = 0; i < 200; ++i) {
    const auto f = random_formula(rng, 10, 4);
    Weights w;
    for (Var v = 1; v <= 10; ++v) {
      const double p = rng.uniform();
      w[v] = {p, 1 - p};
    }
    CompileStats st;
    const double a = wmc(compile(f, {}, &st), w);
    hits += st.cache_hits;
    const double b = wmc(compile(f, off), w);
    CHECK(std::abs(a - b) <= 1e-12);
  }
  CHECK(hits > 0);
}

TEST_CASE("cross-query cache") {
  CircuitCache cache;
  const auto f = parse_formula("x1 & x2 | x3");
  const auto a = cache.get_or_compile(f);
  const auto b = cache.get_or_compile(parse_formula("x1 & x2 | x3"));
  CHECK(a == b);
  CHECK(cache.hits() == 1);
  CHECK(cache.size() == 1);
}

TEST_CASE("budget errors") {
  CompileOptions small;
  small.var_limit = 3;
  CHECK(code_of([&] { (void)compile(parse_formula("x1 | x2 | x3 | x4"), small); }) == Errc::VarLimitExceeded);
  CompileOptions quick;
  quick.time_budget_s = 0.0;
  quick.cache = false;
  std::vector<BoolFormula> terms;
  for (Var v = 1; v <= 40; v += 2) terms.push_back(f_and({f_lit(v), f_lit(v + 1), f_lit(v % 40 + 2)}));
  CHECK(code_of([&] { (void)compile(f_or(terms), quick); }) == Errc::Timeout);
}

TEST_CASE("circuit text round trip") {
  const auto c = compile(parse_formula("x1 & !x2 | x3 & (x4 | !x1)"));
  const auto text = export_circuit(c);
  CHECK(text.rfind("ddnnf ", 0) == 0);
  const auto back = import_circuit(text);
  CHECK(export_circuit(back) == text);
  CHECK(code_of([] { (void)import_circuit("ddnnf 1 0\n0 Q\n"); }) == Errc::LineParse);
}

TEST_CASE("formula text") {
  const auto f = parse_formula("!(x1 | x2) & x3");
  CHECK(to_string(f) == "!x1 & !x2 & x3");
  CHECK(is_nnf(f));
  CHECK(variables(f) == std::vector<Var>{1, 2, 3});
}

// ---------------------------------------------------------------------------
// Safe plans

TEST_CASE("safe_plan classification") {
  auto cls = [](const char* q) { return safe_plan(query::parse_query(q)); };
  const auto star = cls("SELECT ?x WHERE { ?x <urn:p1> ?y . ?x <urn:p2> ?z }");
  CHECK(star.safe);
  CHECK(to_string(star.root).rfind("Join(", 0) == 0);

  const auto chain = cls("SELECT ?x WHERE { ?x <urn:p1> ?y . ?y <urn:p2> ?z . ?z <urn:p3> ?w }");
  CHECK_FALSE(chain.safe);
  CHECK(chain.reason.rfind("NotHierarchical", 0) == 0);

  const auto cycle = cls("SELECT ?x WHERE { ?x <urn:p1> ?y . ?y <urn:p2> ?z . ?x <urn:p3> ?z }");
  CHECK_FALSE(cycle.safe);
  CHECK(cls("SELECT ?x WHERE { ?x <urn:p1> ?y . ?y <urn:p2> ?z }").safe);

  const auto single = cls("SELECT ?x WHERE { ?x <urn:p1> ?y }");
  REQUIRE(single.safe);
  CHECK(single.root.kind == SafeNode::Kind::IndependentProject);
  CHECK(single.root.var == "y");

  CHECK(cls("SELECT ?x WHERE { ?x <urn:p> ?y . ?y <urn:p> ?z }").reason.rfind("UnsupportedShape", 0) == 0);
  CHECK(cls("SELECT ?x WHERE { ?x ?p ?y }").reason.rfind("UnsupportedShape", 0) == 0);
  CHECK(cls("SELECT ?x WHERE { ?x <urn:p> ?y OPTIONAL { ?y <urn:q> ?z } }").reason.rfind("UnsupportedShape", 0) == 0);
}

TEST_CASE("lifted examples") {
  SUBCASE("project over two ground triples") {
    const auto g = kg::parse_graph_file("<urn:a> <urn:p> <urn:b> @0.5 .\n<urn:a> <urn:p> <urn:c> @0.5 .\n");
    const auto plan = safe_plan(query::parse_query("SELECT ?x WHERE { ?x <urn:p> ?y }"));
    const auto r = lifted_eval(plan, g);
    REQUIRE(r.size() == 1);
    CHECK(r.begin()->second == doctest::Approx(0.75).epsilon(1e-15));
  }
  SUBCASE("join of an uncertain and a certain triple") {
    const auto g = kg::parse_graph_file(
        "<urn:g07812> <urn:hasFault> <urn:Overheat> @0.12 .\n<urn:g07812> <urn:type> <urn:AngleGrinder> .\n");
    const auto plan = safe_plan(
        query::parse_query("SELECT ?g WHERE { ?g <urn:hasFault> <urn:Overheat> . ?g <urn:type> <urn:AngleGrinder> }"));
    const auto r = lifted_eval(plan, g);
    REQUIRE(r.size() == 1);
    CHECK(r.begin()->second == doctest::Approx(0.12).epsilon(1e-15));
  }
  SUBCASE("empty instantiation") {
    const auto g = kg::parse_graph_file("<urn:a> <urn:q> <urn:b> @0.5 .\n");
    const auto plan = safe_plan(query::parse_query("SELECT ?x WHERE { ?x <urn:p> ?y . ?x <urn:q> ?z }"));
    REQUIRE(plan.safe);
    CHECK(lifted_probability(plan, g, {*g.find(kg::make_iri("urn:a"))}) == 0.0);
  }
  SUBCASE("unsafe plans are rejected") {
    const auto g = kg::parse_graph_file("<urn:a> <urn:q> <urn:b> @0.5 .\n");
    const auto plan = safe_plan(query::parse_query("SELECT ?x WHERE { ?x <urn:p> ?y . ?y <urn:q> ?z . ?z <urn:r> ?w }"));
    CHECK(code_of([&] { (void)lifted_probability(plan, g, {}); }) == Errc::InvalidArgument);
  }
}

TEST_CASE("lifted and compiled inference agree") {
  const auto g = kg::parse_graph_file(
      "<urn:a> <urn:p1> <urn:b> @0.3 .\n<urn:a> <urn:p1> <urn:c> @0.6 .\n<urn:a> <urn:p2> <urn:d> @0.5 .\n"
      "<urn:b> <urn:p1> <urn:c> @0.9 .\n<urn:b> <urn:p2> <urn:a> @0.2 .\n<urn:b> <urn:p2> <urn:c> @0.7 .\n"
      "<urn:c> <urn:p1> <urn:a> .\n");
  mc::CounterRng rng(mc::derive_stream(8, mc::StreamTag::Corpus, 0));
  for (const char* q : {"SELECT ?x WHERE { ?x <urn:p1> ?y . ?x <urn:p2> ?z }", "SELECT * WHERE { ?x <urn:p1> ?y . ?x <urn:p2> ?z }",
                        "SELECT ?x ?y WHERE { ?x <urn:p1> ?y . ?x <urn:p2> ?z }", "SELECT ?y WHERE { ?x <urn:p1> ?y }"}) {
    const auto ast = query::parse_query(q);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> probs(g.size());
      for (auto& p : probs) p = rng.uniform();
      InferOptions lifted, compiled;
      lifted.method = Method::Lifted;
      compiled.method = Method::Compiled;
      lifted.probs = compiled.probs = &probs;
      const auto a = infer(ast, g, lifted);
      const auto b = infer(ast, g, compiled);
      CHECK(a.method == "lifted");
      CHECK(b.method == "compiled");
      REQUIRE(a.answers.size() == b.answers.size());
      for (std::size_t i = 0; i < a.answers.size(); ++i) {
        CHECK(a.answers[i].vals == b.answers[i].vals);
        CHECK(std::abs(*a.answers[i].probability - *b.answers[i].probability) <= 1e-12);
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Bayesian networks

TEST_CASE("network encoding examples") {
  BayesNet one;
  one.nodes.push_back({"Fault", {}, {{0.88, 0.12}}, std::nullopt});
  CHECK(bn_probability(one, {{0, true}}) == doctest::Approx(0.12).epsilon(1e-14));
  CHECK(oracle::bn_joint(one, {{0, true}}) == doctest::Approx(0.12).epsilon(1e-15));

  BayesNet chain;
  chain.nodes.push_back({"A", {}, {{0.4, 0.6}}, std::nullopt});
  chain.nodes.push_back({"B", {0}, {{0.9, 0.1}, {0.2, 0.8}}, std::nullopt});
  const double expect = oracle::bn_joint(chain, {{0, false}, {1, true}}) + oracle::bn_joint(chain, {{0, true}, {1, true}});
  CHECK(expect == doctest::Approx(0.4 * 0.1 + 0.6 * 0.8));
  CHECK(std::abs(bn_probability(chain, {{1, true}}) - expect) <= 1e-12);
  CHECK(std::abs(bn_probability(chain, {}) - 1.0) <= 1e-12);

  const auto enc = bn_to_cnf(chain);
  CHECK(enc.indicator.size() == 2);
  CHECK(enc.indicator[0] == std::array<Var, 2>{1, 2});
  for (const auto& [v, w] : enc.cnf.weights) CHECK(v <= enc.cnf.num_vars);
}

TEST_CASE("independent network matches the tuple-independent product") {
  const auto g = kg::parse_graph_file("<urn:a> <urn:p> <urn:b> @0.5 .\n<urn:a> <urn:q> <urn:c> @0.5 .\n");
  BayesNet bn;
  bn.nodes.push_back({"A", {}, {{0.7, 0.3}}, kg::TripleId{0}});
  bn.nodes.push_back({"B", {}, {{0.2, 0.8}}, kg::TripleId{1}});
  const auto ast = query::parse_query("SELECT ?x WHERE { ?x <urn:p> ?y . ?x <urn:q> ?z }");
  InferOptions opts;
  opts.bn = &bn;
  const auto r = infer(ast, g, opts);
  REQUIRE(r.answers.size() == 1);
  CHECK(*r.answers[0].probability == doctest::Approx(0.24).epsilon(1e-14));
  const auto w = oracle::enumerate_worlds(g, ast, bn);
  REQUIRE(w.answers.size() == 1);
  CHECK(w.answers.begin()->second.probability == doctest::Approx(0.24).epsilon(1e-14));
}

TEST_CASE("network validation") {
  BayesNet cyc;
  cyc.nodes.push_back({"A", {1}, {{0.5, 0.5}, {0.5, 0.5}}, std::nullopt});
  cyc.nodes.push_back({"B", {0}, {{0.5, 0.5}, {0.5, 0.5}}, std::nullopt});
  CHECK(code_of([&] { validate(cyc); }) == Errc::CyclicNetwork);
  BayesNet bad;
  bad.nodes.push_back({"A", {}, {{0.5, 0.6}}, std::nullopt});
  CHECK(code_of([&] { validate(bad); }) == Errc::MalformedCpt);
  bad.nodes[0].cpt = {{0.5, 0.5}, {0.5, 0.5}};
  CHECK(code_of([&] { validate(bad); }) == Errc::MalformedCpt);

  const auto parsed = parse_bayesnet(R"({"nodes":[{"name":"B","parents":["A"],"cpt":[[0.9,0.1],[0.2,0.8]]},
                                         {"name":"A","cpt":[[0.4,0.6]],"triple":0}]})");
  REQUIRE(parsed.nodes.size() == 2);
  CHECK(parsed.nodes[0].parents == std::vector<std::size_t>{1});
  CHECK(topo_order(parsed) == std::vector<std::size_t>{1, 0});
  const auto g = kg::parse_graph_file("<urn:a> <urn:p> <urn:b> @0.5 .\n");
  validate(parsed, g);
  auto dangling = parsed;
  dangling.nodes[1].triple = 7;
  CHECK_THROWS_AS(validate(dangling, g), Error);
}

TEST_CASE("DIMACS round trip") {
  const char* text =
      "c example\n"
      "c w 1 0.3 0.7\n"
      "p cnf 3 2\n"
      "1 -2 0\n"
      "2 3 0\n";
  const auto cnf = read_dimacs(text);
  CHECK(cnf.num_vars == 3);
  CHECK(cnf.clauses.size() == 2);
  CHECK(cnf.weights.at(1).pos == doctest::Approx(0.3));
  CHECK(cnf.weights.at(3).pos == 1.0);
  const auto again = read_dimacs(write_dimacs(cnf));
  CHECK(again.clauses == cnf.clauses);
  CHECK(write_dimacs(again) == write_dimacs(cnf));

  // (x1 | !x2) & (x2 | x3) with x2, x3 unweighted: count over x2, x3 of the
  // weighted x1.
  const double got = wmc(compile(cnf_to_formula(cnf)), cnf.weights);
  double want = 0;
  for (int m = 0; m < 8; ++m) {
    const bool x1 = m & 1, x2 = m & 2, x3 = m & 4;
    if ((x1 || !x2) && (x2 || x3)) want += x1 ? 0.3 : 0.7;
  }
  CHECK(got == doctest::Approx(want).epsilon(1e-14));

  CHECK(code_of([] { (void)read_dimacs("p cnf 2 1\n1 3 0\n"); }) == Errc::LineParse);
  CHECK(code_of([] { (void)read_dimacs("p cnf 2 2\n1 2 0\n"); }) == Errc::LineParse);
}
