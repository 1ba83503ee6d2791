#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "probkg/simd/kernels.hpp"

using namespace probkg;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max({1e-300, std::abs(a), std::abs(b)}); }

std::vector<double> uniform(std::size_t n, double lo, double hi, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST_CASE("scalar kernels match libm") {
  const auto xs = uniform(1000, -700, 700, 1);
  std::vector<double> out(xs.size());
  simd::scalar::exp(xs, out);
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(rel(out[i], std::exp(xs[i])) < 1e-15);
  const auto ps = uniform(1000, 1e-300, 1e300, 2);
  simd::scalar::log(ps, out);
  for (std::size_t i = 0; i < ps.size(); ++i) CHECK(rel(out[i], std::log(ps[i])) < 1e-15);
}

TEST_CASE("dispatch honours set_isa and reports names") {
  const auto before = simd::active_isa();
  simd::set_isa(simd::Isa::Scalar);
  CHECK(simd::active_isa() == simd::Isa::Scalar);
  CHECK(simd::isa_name(simd::Isa::Scalar) == "scalar");
  CHECK(simd::isa_supported(simd::Isa::Scalar));
  simd::set_isa(before);
}

#if defined(PROBKG_HAVE_AVX2)
TEST_CASE("avx2 kernels agree with scalar references") {
  if (!simd::isa_supported(simd::Isa::Avx2)) {
    MESSAGE("CPU lacks AVX2; skipping vector equivalence");
    return;
  }
  // Odd lengths exercise the scalar tails.
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 64u, 1001u}) {
    CAPTURE(n);
    const auto xs = uniform(n, -745, 709, 10 + static_cast<unsigned>(n));
    std::vector<double> a(n), b(n);
    simd::scalar::exp(xs, a);
    simd::avx2::exp(xs, b);
    for (std::size_t i = 0; i < n; ++i) {
      if (xs[i] < -708) CHECK(b[i] <= 1e-307);
      else CHECK(rel(a[i], b[i]) < 4e-15);
    }
    const auto ps = uniform(n, 1e-300, 1e300, 20 + static_cast<unsigned>(n));
    simd::scalar::log(ps, a);
    simd::avx2::log(ps, b);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(a[i] - b[i]) < 4e-15 * std::max(1.0, std::abs(a[i])));

    const auto x = uniform(n, -20, 120, 30 + static_cast<unsigned>(n));
    const auto w0 = uniform(5, 0.1, 1, 3);
    double s = 0;
    for (double v : w0) s += v;
    std::vector<double> w;
    for (double v : w0) w.push_back(v / s);
    const auto mu = uniform(5, 0, 100, 4);
    const auto var = uniform(5, 0.5, 5, 5);
    simd::scalar::mixture_pdf(x, w, mu, var, a);
    simd::avx2::mixture_pdf(x, w, mu, var, b);
    // Exponent arguments reach ~700, so rounding of the argument alone costs
    // a few hundred ulps of relative error in either kernel.
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(a[i] - b[i]) <= 2e-13 * a[i] + 1e-300);

    auto p = uniform(n, 0, 1, 40 + static_cast<unsigned>(n));
    auto q = uniform(n, 0, 1, 50 + static_cast<unsigned>(n));
    for (std::size_t i = 0; i < n; i += 3) p[i] = 0.0;
    double sp = 0, sq = 0;
    for (std::size_t i = 0; i < n; ++i) sp += p[i], sq += q[i];
    if (n > 0 && sp > 0 && sq > 0) {
      for (auto& v : p) v /= sp;
      for (auto& v : q) v /= sq;
      CHECK(std::abs(simd::scalar::hist_jsd(p, q) - simd::avx2::hist_jsd(p, q)) < 1e-14);
    }
  }
}
#endif
