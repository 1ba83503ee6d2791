#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>

#include "doctest.h"
#include "probkg/dist/algebra.hpp"
#include "probkg/dist/measures.hpp"
#include "probkg/oracle/oracle.hpp"
#include "probkg/util/error.hpp"

using namespace probkg;
using namespace probkg::dist;
using doctest::Approx;

namespace {

template <class F>
double integrate(F f, double a, double b) {
  double total = 0;
  const int panels = 64;
  for (int i = 0; i < panels; ++i) {
    const double lo = a + (b - a) * i / panels, hi = a + (b - a) * (i + 1) / panels;
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 10, 1e-13);
  }
  return total;
}

Errc code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::InvalidArgument;
}

Gmm mix(std::vector<std::pair<double, std::pair<double, double>>> parts) {
  std::vector<double> w;
  std::vector<Gaussian> c;
  for (auto& [wi, mv] : parts) {
    w.push_back(wi);
    c.push_back({{mv.first}, {mv.second}});
  }
  return make_gmm(w, c);
}

}  // namespace

TEST_CASE("literal grammar round trip") {
  for (const char* s : {"gmm(1:N(80,1))", "gmm(0.25:N(-1.5,0.5);0.75:N(3,2))", "hist(0,1,3|0.5,0.5)", "dir(1,2,3)",
                        "gmm(1:N(1,2,0.5,0.25))"}) {
    const auto d = parse_distribution(s);
    CHECK(parse_distribution(format_distribution(d)) == d);
  }
  CHECK(code_of([] { parse_distribution("gmm(0.5:N(0,1))"); }) == Errc::InvalidDistribution);
  CHECK(code_of([] { parse_distribution("gmm(1:N(0,-1))"); }) == Errc::InvalidDistribution);
  CHECK(code_of([] { parse_distribution("hist(0,0|1)"); }) == Errc::InvalidDistribution);
  CHECK(code_of([] { parse_distribution("dir(1)"); }) == Errc::InvalidDistribution);
}

TEST_CASE("convolve") {
  const auto c = convolve(gaussian(1, 1), gaussian(2, 4));
  REQUIRE(c.size() == 1);
  CHECK(c.components[0].mean[0] == 3);
  CHECK(c.components[0].var[0] == 5);

  const auto g = mix({{0.3, {2, 1}}, {0.7, {5, 2}}});
  const auto id = convolve(gaussian(0, 1e-12), g);
  for (double x : {0.0, 2.0, 4.0, 7.0}) CHECK(cdf(Distribution(id), x) == Approx(cdf(Distribution(g), x)).epsilon(1e-9));

  const auto a = mix({{0.5, {0, 1}}, {0.5, {4, 1}}});
  const auto b = gaussian(1, 1);
  const auto conv = convolve(a, b);
  CHECK(conv.size() == 2);
  for (double z : {-2.0, 0.5, 1.0, 3.0, 5.0, 8.0}) {
    // P(X + Y <= z) = integral of f_a(x) F_b(z - x)
    const double ref = integrate([&](double x) { return pdf(a, x) * cdf(Distribution(b), z - x); }, -15, 20);
    CHECK(std::abs(cdf(Distribution(conv), z) - ref) < 1e-6);
  }
  CHECK(code_of([] { convolve(gaussian(0, 1), make_gmm({1}, {{{0, 0}, {1, 1}}})); }) == Errc::DimensionMismatch);
}

TEST_CASE("convolution moments and reduction") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.1, 1);
  std::vector<std::pair<double, std::pair<double, double>>> pa, pb;
  double sa = 0, sb = 0;
  for (int i = 0; i < 8; ++i) {
    pa.push_back({u(rng), {10 * u(rng), u(rng)}});
    pb.push_back({u(rng), {10 * u(rng), u(rng)}});
    sa += pa.back().first;
    sb += pb.back().first;
  }
  for (auto& p : pa) p.first /= sa;
  for (auto& p : pb) p.first /= sb;
  const auto a = mix(pa), b = mix(pb);
  const auto full = convolve(a, b, 1000);
  const auto small = convolve(a, b);
  CHECK(full.size() == 64);
  CHECK(small.size() <= kMaxComponents);
  const auto ma = moments(Distribution(a)), mb = moments(Distribution(b));
  for (const auto* g : {&full, &small}) {
    const auto m = moments(Distribution(*g));
    CHECK(m.mean[0] == Approx(ma.mean[0] + mb.mean[0]).epsilon(1e-9));
    CHECK(m.variance[0] == Approx(ma.variance[0] + mb.variance[0]).epsilon(1e-9));
  }
}

TEST_CASE("fuse") {
  auto f = fuse(gaussian(0, 1), gaussian(0, 1));
  CHECK(f.components[0].mean[0] == Approx(0));
  CHECK(f.components[0].var[0] == Approx(0.5));
  f = fuse(gaussian(0, 1), gaussian(2, 1));
  CHECK(f.components[0].mean[0] == Approx(1));
  CHECK(f.components[0].var[0] == Approx(0.5));

  const auto a = mix({{0.4, {0, 1}}, {0.6, {3, 2}}});
  const auto b = mix({{0.5, {1, 0.5}}, {0.5, {4, 1}}});
  const auto p = fuse(a, b);
  CHECK(p.size() <= 4);
  const double z = integrate([&](double x) { return pdf(a, x) * pdf(b, x); }, -15, 20);
  for (int i = 0; i < 100; ++i) {
    const double x = -4 + 0.1 * i;
    CHECK(std::abs(pdf(p, x) - pdf(a, x) * pdf(b, x) / z) < 1e-6);
  }
}

TEST_CASE("affine") {
  const auto id = affine(gaussian(80, 1), 1, 0);
  CHECK(id == Distribution(gaussian(80, 1)));
  const auto f = std::get<Gmm>(affine(gaussian(80, 1), 1.8, 32));
  CHECK(f.components[0].mean[0] == Approx(176));
  CHECK(f.components[0].var[0] == Approx(3.24));
  const auto h = make_histogram({0, 1, 3}, {0.25, 0.75});
  const auto m = std::get<Histogram>(affine(h, -1, 0));
  CHECK(m.edges == std::vector<double>{-3, -1, 0});
  CHECK(m.masses == std::vector<double>{0.75, 0.25});
  CHECK(code_of([] { affine(make_dirichlet({1, 1}), 2, 0); }) == Errc::UnsupportedFamily);
  CHECK(code_of([] { affine(gaussian(0, 1), 0, 1); }) == Errc::ZeroScale);
}

TEST_CASE("prob_mass") {
  CHECK(prob_mass(Distribution(gaussian(0, 1)), {0, kInf}) == Approx(0.5));
  CHECK(prob_mass(Distribution(gaussian(80, 1)), {-kInf, kInf}) == Approx(1));
  const Distribution two = mix({{0.5, {0, 1}}, {0.5, {10, 1}}});
  CHECK(std::abs(prob_mass(two, {5, kInf}) - 0.5) < 1e-9);
  const double ref = integrate([&](double x) { return pdf(two, x); }, 5, 30);
  CHECK(std::abs(prob_mass(two, {5, kInf}) - ref) < 1e-9);
  const Distribution h = make_histogram({0, 1, 3}, {0.25, 0.75});
  CHECK(prob_mass(h, {0.5, 2}) == Approx(0.125 + 0.375));
  CHECK(code_of([] { prob_mass(Distribution(make_dirichlet({1, 1})), {0, 1}); }) == Errc::UnsupportedFamily);
  CHECK(code_of([&] { prob_mass(two, {2, 1}); }) == Errc::BadInterval);
  double prev = 0;
  for (double hi = -5; hi < 16; hi += 0.5) {
    const double v = prob_mass(two, {-kInf, hi});
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("moments") {
  auto m = moments(Distribution(gaussian(80, 1)));
  CHECK(m.mean[0] == 80);
  CHECK(m.variance[0] == 1);
  m = moments(Distribution(mix({{0.5, {0, 1}}, {0.5, {2, 1}}})));
  CHECK(m.mean[0] == Approx(1));
  CHECK(m.variance[0] == Approx(2));
  m = moments(Distribution(make_dirichlet({1, 1, 1})));
  for (double v : m.mean) CHECK(v == Approx(1.0 / 3));
}

TEST_CASE("jsd") {
  const Distribution p = mix({{0.3, {0, 1}}, {0.7, {2, 0.5}}});
  CHECK(jsd(p, p, JsdMethod::Quadrature) < 1e-9);
  const Distribution h1 = make_histogram({0, 1, 2}, {1, 0}), h2 = make_histogram({0, 1, 2}, {0, 1});
  CHECK(jsd(h1, h2, JsdMethod::Closed) == Approx(std::log(2.0)));
  const Distribution a = gaussian(0, 1), b = gaussian(1, 1);
  const double q = jsd(a, b, JsdMethod::Quadrature);
  CHECK(std::abs(q - oracle::quad_jsd(a, b)) < 1e-6);
  CHECK(jsd(b, a, JsdMethod::Quadrature) == Approx(q).epsilon(1e-12));
  CHECK(code_of([&] { jsd(a, h1, JsdMethod::Quadrature); }) == Errc::FamilyMismatch);
  CHECK(code_of([&] { jsd(a, b, JsdMethod::Closed); }) == Errc::UnsupportedMethod);
  const Distribution h3 = make_histogram({0, 1.5, 2}, {0.5, 0.5});
  CHECK(code_of([&] { jsd(h1, h3, JsdMethod::Closed); }) == Errc::EdgesMismatch);
  CHECK(std::abs(jsd(h1, h3, JsdMethod::Quadrature) - oracle::quad_jsd(h1, h3)) < 1e-9);
}

TEST_CASE("coarsen and the lower bound") {
  const Distribution n = gaussian(0, 1);
  auto c = coarsen(n, std::vector<double>{-8, 0, 8});
  CHECK(c.masses[0] == Approx(0.5));
  CHECK(c.masses[1] == Approx(0.5));
  const Histogram h = make_histogram({0, 1, 3}, {0.25, 0.75});
  CHECK(coarsen(Distribution(h), h.edges) == h);
  const Distribution g = mix({{0.5, {0, 1}}, {0.5, {3, 2}}});
  std::vector<double> grid;
  for (int i = 0; i <= 64; ++i) grid.push_back(-6 + 14.0 * i / 64);
  c = coarsen(g, grid);
  for (std::size_t i = 1; i + 1 < c.masses.size(); ++i)
    CHECK(std::abs(c.masses[i] - prob_mass(g, {grid[i], grid[i + 1]})) < 1e-12);
  double sum = 0;
  for (double m : c.masses) sum += m;
  CHECK(std::abs(sum - 1) < 1e-12);
  CHECK(code_of([&] { coarsen(g, std::vector<double>{1}); }) == Errc::BadGrid);
  CHECK(code_of([&] { coarsen(g, std::vector<double>{1, 0}); }) == Errc::BadGrid);

  CHECK(jsd_lower_bound(g, g, grid) < 1e-12);
  const Distribution l = make_histogram({0, 1}, {1}), r = make_histogram({2, 3}, {1});
  CHECK(jsd_lower_bound(l, r, std::vector<double>{0, 1.5, 3}) == Approx(std::log(2.0)));
  const Distribution a = gaussian(0, 1), b = gaussian(3, 1);
  std::vector<double> g16;
  for (int i = 0; i <= 16; ++i) g16.push_back(-4 + 11.0 * i / 16);
  CHECK(jsd_lower_bound(a, b, g16) <= oracle::quad_jsd(a, b) + 1e-9);
  // Splitting a cell never lowers the bound.
  auto finer = g16;
  finer.insert(finer.begin() + 5, 0.5 * (g16[4] + g16[5]));
  CHECK(jsd_lower_bound(a, b, finer) >= jsd_lower_bound(a, b, g16) - 1e-15);
}

TEST_CASE("equal probability grid") {
  const Distribution a = gaussian(0, 1), b = gaussian(4, 2);
  const auto grid = equal_probability_grid(a, b, 32);
  CHECK(grid.size() >= 2);
  CHECK(std::is_sorted(grid.begin(), grid.end()));
  CHECK(jsd_lower_bound(a, b, grid) <= jsd(a, b, JsdMethod::Quadrature) + 1e-9);
}
