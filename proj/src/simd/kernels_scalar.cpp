#include <cassert>
#include <cmath>
#include <numbers>

#include "probkg/simd/kernels.hpp"

namespace probkg::simd::scalar {

void mixture_pdf(std::span<const double> xs, std::span<const double> weights,
                 std::span<const double> means, std::span<const double> vars,
                 std::span<double> out) {
  assert(out.size() >= xs.size());
  const std::size_t k = weights.size();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double d = xs[i] - means[j];
      const double c = weights[j] / std::sqrt(2.0 * std::numbers::pi * vars[j]);
      acc += c * std::exp(-0.5 * d * d / vars[j]);
    }
    out[i] = acc;
  }
}

double hist_jsd(std::span<const double> p, std::span<const double> q) {
  assert(p.size() == q.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double s = p[i] + q[i];
    if (s <= 0.0) continue;
    if (p[i] > 0.0) acc += p[i] * std::log(2.0 * p[i] / s);
    if (q[i] > 0.0) acc += q[i] * std::log(2.0 * q[i] / s);
  }
  return 0.5 * acc;
}

void exp(std::span<const double> xs, std::span<double> out) {
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = std::exp(xs[i]);
}

void log(std::span<const double> xs, std::span<double> out) {
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = std::log(xs[i]);
}

}  // namespace probkg::simd::scalar
