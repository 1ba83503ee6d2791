#include <cmath>
#include <functional>

#include "doctest.h"
#include "probkg/geo/boxes.hpp"
#include "probkg/mc/rng.hpp"
#include "probkg/util/error.hpp"

using namespace probkg;
using namespace probkg::geo;

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

ConceptSpace hard(std::size_t dim) {
  ConceptSpace s;
  s.dim = dim;
  s.tau = 0;
  return s;
}

Box random_box(mc::CounterRng& rng, std::size_t dim) {
  Box b;
  for (std::size_t i = 0; i < dim; ++i) {
    const double lo = rng.uniform();
    b.lo.push_back(lo);
    b.hi.push_back(lo + 0.05 + 0.6 * rng.uniform());
  }
  return b;
}

}  // namespace

TEST_CASE("conditional probability examples") {
  auto s = hard(2);
  s.boxes["C"] = {{0, 0}, {1, 1}};
  s.boxes["D"] = {{0, 0}, {0.85, 1}};
  CHECK(cond_prob(s, "C", "D") == doctest::Approx(0.85).epsilon(1e-15));
  s.boxes["Big"] = {{-1, -1}, {2, 2}};
  CHECK(cond_prob(s, "C", "Big") == 1.0);
  s.boxes["Far"] = {{3, 3}, {4, 4}};
  CHECK(cond_prob(s, "C", "Far") == 0.0);
  CHECK(code_of([&] { (void)cond_prob(s, "C", "Nope"); }) == Errc::UnknownConcept);
  s.boxes["Flat"] = {{0, 0}, {0, 1}};
  CHECK(code_of([&] { (void)cond_prob(s, "Flat", "C"); }) == Errc::DegenerateConditioningBox);
}

TEST_CASE("fit examples") {
  SUBCASE("one conditional") {
    const auto r = fit({{StatAxiom::Kind::Conditional, "C", "D", 0.85}}, 2);
    CHECK(std::abs(cond_prob(r.space, "C", "D") - 0.85) <= 0.02);
    for (std::size_t i = 1; i < r.loss.size(); ++i) CHECK(r.loss[i] <= r.loss[i - 1]);
  }
  SUBCASE("mutual subsumption") {
    const auto r = fit({{StatAxiom::Kind::Conditional, "C", "D", 1.0}, {StatAxiom::Kind::Conditional, "D", "C", 1.0}}, 2);
    CHECK(cond_prob(r.space, "C", "D") >= 0.98);
    CHECK(cond_prob(r.space, "D", "C") >= 0.98);
    CHECK(std::abs(volume(r.space, "C") / volume(r.space, "D") - 1.0) < 0.05);
  }
  SUBCASE("inconsistent pair") {
    const auto r = fit({{StatAxiom::Kind::Conditional, "C", "D", 0.0}, {StatAxiom::Kind::Conditional, "C", "D", 1.0}}, 2);
    CHECK(r.loss.back() >= 0.25 - 1e-12);
  }
  CHECK(code_of([] { (void)fit({}, 2); }) == Errc::EmptyAxioms);
}

TEST_CASE("fit is deterministic in the seed") {
  const std::vector<StatAxiom> ax = {{StatAxiom::Kind::Conditional, "A", "B", 0.3},
                                     {StatAxiom::Kind::Subsumption, "B", "C", 1.0}};
  FitOptions o;
  o.iters = 200;
  CHECK(space_to_json(fit(ax, 3, o).space) == space_to_json(fit(ax, 3, o).space));
}

TEST_CASE("gradient fidelity") {
  mc::CounterRng rng(mc::derive_stream(11, mc::StreamTag::Corpus, 0));
  for (int trial = 0; trial < 10; ++trial) {
    ConceptSpace s;
    s.dim = 3;
    for (const char* c : {"A", "B", "C"}) s.boxes[c] = random_box(rng, 3);
    const std::vector<StatAxiom> ax = {{StatAxiom::Kind::Conditional, "A", "B", 0.4},
                                       {StatAxiom::Kind::Subsumption, "C", "A", 1.0}};
    CHECK(finite_diff_check(s, ax) < 1e-4);
  }
  SUBCASE("a perfectly fitted axiom has zero gradient") {
    ConceptSpace s;
    s.dim = 1;
    s.boxes["A"] = {{0.2}, {0.6}};
    s.boxes["B"] = {{0}, {1}};
    s.tau = 0.1;
    const double exact = cond_prob(s, "A", "B");
    const std::vector<StatAxiom> fitted = {{StatAxiom::Kind::Conditional, "A", "B", exact}};
    for (double gv : loss_gradient(s, fitted)) CHECK(std::abs(gv) < 1e-8);
    CHECK(finite_diff_check(s, fitted) < 1e-8);
  }
  SUBCASE("coarse steps lose accuracy") {
    ConceptSpace s;
    s.dim = 2;
    for (const char* c : {"A", "B"}) s.boxes[c] = random_box(rng, 2);
    const std::vector<StatAxiom> ax = {{StatAxiom::Kind::Conditional, "A", "B", 0.7}};
    CHECK(finite_diff_check(s, ax, 1e-1) > finite_diff_check(s, ax, 1e-5));
  }
}

TEST_CASE("instance probability") {
  const auto r = fit({{StatAxiom::Kind::Conditional, "AngleGrinder", "HasFault", 0.12}}, 2);
  const std::vector<std::pair<std::string, std::string>> abox = {{"g07812", "AngleGrinder"}};
  CHECK(std::abs(instance_prob(r.space, abox, "g07812", "HasFault") - 0.12) <= 0.02);
  CHECK(instance_prob(r.space, {{"g07812", "HasFault"}}, "g07812", "HasFault") == 1.0);
  CHECK(code_of([&] { (void)instance_prob(r.space, abox, "nobody", "HasFault"); }) == Errc::UnknownIndividual);

  auto s = hard(2);
  s.boxes["Tool"] = {{0, 0}, {1, 1}};
  s.boxes["Grinder"] = {{0, 0}, {0.5, 0.5}};
  s.boxes["Faulty"] = {{0, 0}, {0.25, 1}};
  const std::vector<std::pair<std::string, std::string>> both = {{"x", "Tool"}, {"x", "Grinder"}};
  CHECK(instance_prob(s, both, "x", "Faulty") == doctest::Approx(cond_prob(s, "Grinder", "Faulty")));
  CHECK(instance_prob(s, both, "x", "Faulty") == doctest::Approx(0.5));
}

TEST_CASE("clamping under fuzzing") {
  mc::CounterRng rng(mc::derive_stream(12, mc::StreamTag::Corpus, 0));
  for (int i = 0; i < 2000; ++i) {
    ConceptSpace s;
    s.dim = 1 + rng() % 4;
    s.tau = i % 2 ? 0.0 : 0.5 * rng.uniform();
    s.boxes["C"] = random_box(rng, s.dim);
    s.boxes["D"] = random_box(rng, s.dim);
    if (i % 7 == 0) s.boxes["D"] = s.boxes["C"];
    const double p = cond_prob(s, "C", "D");
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
}

TEST_CASE("enlarging D never lowers the hard conditional") {
  mc::CounterRng rng(mc::derive_stream(13, mc::StreamTag::Corpus, 0));
  for (int i = 0; i < 500; ++i) {
    auto s = hard(2);
    s.boxes["C"] = random_box(rng, 2);
    s.boxes["D"] = random_box(rng, 2);
    const double before = cond_prob(s, "C", "D");
    auto& d = s.boxes["D"];
    for (std::size_t k = 0; k < 2; ++k) {
      d.lo[k] -= 0.2 * rng.uniform();
      d.hi[k] += 0.2 * rng.uniform();
    }
    CHECK(cond_prob(s, "C", "D") >= before);
  }
}

TEST_CASE("soft geometry approaches the hard one") {
  mc::CounterRng rng(mc::derive_stream(14, mc::StreamTag::Corpus, 0));
  for (int i = 0; i < 50; ++i) {
    auto s = hard(2);
    s.boxes["C"] = random_box(rng, 2);
    s.boxes["D"] = random_box(rng, 2);
    const double exact = cond_prob(s, "C", "D");
    double prev = INFINITY;
    for (double tau : {1.0, 0.1, 0.01}) {
      s.tau = tau;
      const double err = std::abs(cond_prob(s, "C", "D") - exact);
      CHECK(err <= prev + 1e-12);
      prev = err;
    }
  }
}

TEST_CASE("axiom files and space JSON") {
  const auto ax = parse_axioms("# devices\ncond AngleGrinder HasFault 0.12\nsubs AngleGrinder Tool\n\n");
  REQUIRE(ax.size() == 2);
  CHECK(ax[0].kind == StatAxiom::Kind::Conditional);
  CHECK(ax[0].p == doctest::Approx(0.12));
  CHECK(ax[1].kind == StatAxiom::Kind::Subsumption);
  CHECK(ax[1].p == 1.0);
  CHECK(code_of([] { (void)parse_axioms("cond A B\n"); }) == Errc::LineParse);
  CHECK(code_of([] { (void)parse_axioms("cond A B 1.5\n"); }) == Errc::BadProbability);

  auto s = hard(2);
  s.tau = 0.25;
  s.boxes["C"] = {{0, 0.5}, {1, 1.5}};
  const auto text = space_to_json(s);
  const auto back = space_from_json(text);
  CHECK(back.dim == 2);
  CHECK(back.tau == 0.25);
  CHECK(back.boxes.at("C").hi == std::vector<double>{1, 1.5});
  CHECK(space_to_json(back) == text);
}
