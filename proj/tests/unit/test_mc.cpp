#include <cmath>
#include <numeric>

#include "doctest.h"
#include "probkg/dist/measures.hpp"
#include "probkg/mc/sampler.hpp"
#include "probkg/oracle/oracle.hpp"

using namespace probkg;
using dist::Distribution;

namespace {

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double variance_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return s / (v.size() - 1);
}

}  // namespace

TEST_CASE("sample") {
  const Distribution n = dist::gaussian(0, 1);
  const auto xs = mc::sample(n, 100000, 42);
  CHECK(std::abs(mean_of(xs)) < 3.0 / std::sqrt(1e5));
  CHECK(xs == mc::sample(n, 100000, 42));
  CHECK(xs != mc::sample(n, 100000, 43));

  const Distribution d = dist::make_dirichlet({1, 1});
  const auto pts = mc::sample(d, 1000, 7);
  REQUIRE(pts.size() == 2000);
  for (std::size_t i = 0; i < 1000; ++i) {
    CHECK(pts[2 * i] >= 0);
    CHECK(pts[2 * i] <= 1);
    CHECK(pts[2 * i] + pts[2 * i + 1] == doctest::Approx(1).epsilon(1e-12));
  }
  const Distribution h = dist::make_histogram({0, 1, 3}, {0.25, 0.75});
  for (double x : mc::sample(h, 1000, 3)) {
    CHECK(x >= 0);
    CHECK(x <= 3);
  }
}

TEST_CASE("threshold decisions far from the threshold") {
  const Distribution n = dist::gaussian(0, 1);
  for (auto s : {mc::Strategy::Naive, mc::Strategy::Stratified, mc::Strategy::Sprt, mc::Strategy::Cascade}) {
    CAPTURE(mc::strategy_name(s));
    mc::SamplerConfig cfg;
    cfg.strategy = s;
    const auto d = mc::mc_threshold(n, 0, 0.9, cfg);
    CHECK(d.verdict == mc::Verdict::Below);
    CHECK(d.samples_used <= cfg.budget);
  }
}

TEST_CASE("SPRT near the threshold often runs out of budget") {
  const Distribution n = dist::gaussian(0, 1);
  int undecided = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    mc::SamplerConfig cfg;
    cfg.strategy = mc::Strategy::Sprt;
    cfg.budget = 500;
    cfg.seed = seed;
    const auto d = mc::mc_threshold(n, 0, seed % 2 ? 0.501 : 0.499, cfg);
    if (d.verdict == mc::Verdict::Undecided) ++undecided;
  }
  CHECK(undecided >= 50);
}

TEST_CASE("SPRT stops early on easy cases") {
  const Distribution n = dist::gaussian(0, 1);
  const double c = dist::quantile(n, 0.01);  // P(X > c) = 0.99
  int early = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    mc::SamplerConfig cfg;
    cfg.strategy = mc::Strategy::Sprt;
    cfg.seed = seed;
    const auto d = mc::mc_threshold(n, c, 0.5, cfg);
    CHECK(d.verdict == mc::Verdict::Above);
    if (d.samples_used < cfg.budget / 10) ++early;
  }
  CHECK(early >= 95);
}

TEST_CASE("stratified variance does not exceed naive on a unimodal input") {
  const Distribution n = dist::gaussian(1, 4);
  std::vector<double> naive, strat;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    mc::SamplerConfig cfg;
    cfg.budget = 2000;
    cfg.seed = seed;
    cfg.strategy = mc::Strategy::Naive;
    naive.push_back(mc::mc_threshold(n, 0.5, 0.5, cfg).estimate);
    cfg.strategy = mc::Strategy::Stratified;
    strat.push_back(mc::mc_threshold(n, 0.5, 0.5, cfg).estimate);
  }
  CHECK(variance_of(strat) <= variance_of(naive));
  CHECK(mean_of(strat) == doctest::Approx(dist::prob_mass(n, {0.5, dist::kInf})).epsilon(0.01));
}

TEST_CASE("mc_jsd") {
  const Distribution p = dist::gaussian(0, 1), q = dist::gaussian(5, 1);
  CHECK(std::abs(mc::mc_jsd(p, p, 100000, 1)) < 0.01);
  CHECK(std::abs(mc::mc_jsd(p, q, 100000, 1) - oracle::quad_jsd(p, q)) < 0.02);
  CHECK(mc::mc_jsd(p, q, 1000, 9) == mc::mc_jsd(p, q, 1000, 9));

  const Distribution r = dist::gaussian(1, 1);
  std::vector<double> spread;
  for (std::size_t n : {1000u, 10000u, 100000u}) {
    std::vector<double> est;
    for (std::uint64_t s = 0; s < 20; ++s) est.push_back(mc::mc_jsd(p, r, n, 100 + s));
    spread.push_back(variance_of(est));
  }
  CHECK(spread[1] < spread[0]);
  CHECK(spread[2] < spread[1]);
  // Roughly 1/n: a tenfold n should cut variance by at least 3x.
  CHECK(spread[2] * 3 < spread[1]);
}

TEST_CASE("wilson interval brackets the estimate") {
  const auto w = mc::wilson(0.3, 100);
  CHECK(w.lo < 0.3);
  CHECK(w.hi > 0.3);
  CHECK(mc::wilson(0, 10).lo == doctest::Approx(0));
}
