#include "probkg/mc/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "probkg/dist/measures.hpp"
#include "probkg/mc/rng.hpp"
#include "probkg/simd/kernels.hpp"
#include "probkg/util/error.hpp"

namespace probkg::mc {

Strategy parse_strategy(std::string_view name) {
  if (name == "naive") return Strategy::Naive;
  if (name == "stratified") return Strategy::Stratified;
  if (name == "sprt") return Strategy::Sprt;
  if (name == "cascade") return Strategy::Cascade;
  fail(Errc::InvalidArgument, "unknown strategy '" + std::string(name) + "'");
}

std::string_view strategy_name(Strategy s) noexcept {
  switch (s) {
    case Strategy::Naive: return "naive";
    case Strategy::Stratified: return "stratified";
    case Strategy::Sprt: return "sprt";
    case Strategy::Cascade: return "cascade";
  }
  return "?";
}

std::string_view verdict_name(Verdict v) noexcept {
  switch (v) {
    case Verdict::Above: return "above";
    case Verdict::Below: return "below";
    case Verdict::Undecided: return "undecided";
  }
  return "?";
}

namespace {

// Draws scalar values from a 1-d Gmm or Histogram.
class ScalarDrawer {
 public:
  ScalarDrawer(const dist::Distribution& d, std::uint64_t key) : d_(d), rng_(key) {
    if (const auto* g = std::get_if<dist::Gmm>(&d)) {
      if (g->dim() != 1) fail(Errc::DimensionMismatch, "scalar sampling needs a 1-d mixture");
      cumulative(g->weights);
    } else if (const auto* h = std::get_if<dist::Histogram>(&d)) {
      cumulative(h->masses);
    } else {
      fail(Errc::UnsupportedFamily, "scalar sampling is not defined for dirichlet");
    }
  }

  double operator()() {
    const std::size_t k = pick();
    if (const auto* g = std::get_if<dist::Gmm>(&d_)) {
      const auto& c = g->components[k];
      return c.mean[0] + std::sqrt(c.var[0]) * normal_(rng_);
    }
    const auto& h = std::get<dist::Histogram>(d_);
    return h.edges[k] + rng_.uniform() * (h.edges[k + 1] - h.edges[k]);
  }

  CounterRng& rng() { return rng_; }

 private:
  void cumulative(const std::vector<double>& w) {
    double acc = 0.0;
    for (double x : w) cum_.push_back(acc += x);
  }
  std::size_t pick() {
    const double u = rng_.uniform() * cum_.back();
    const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
    std::size_t k = static_cast<std::size_t>(it - cum_.begin());
    if (k >= cum_.size()) k = cum_.size() - 1;
    // Skip zero-mass histogram bins that upper_bound can land on.
    while (k + 1 < cum_.size() && (k == 0 ? cum_[0] : cum_[k] - cum_[k - 1]) <= 0.0) ++k;
    return k;
  }

  const dist::Distribution& d_;
  CounterRng rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::vector<double> cum_;
};

void check_config(const SamplerConfig& cfg, double theta) {
  if (cfg.budget < 1) fail(Errc::InvalidArgument, "budget must be >= 1");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 0.5) || !(cfg.beta > 0.0 && cfg.beta < 0.5))
    fail(Errc::InvalidArgument, "alpha and beta must be in (0, 0.5)");
  if (cfg.strata < 1) fail(Errc::InvalidArgument, "strata must be >= 1");
  if (!(theta > 0.0 && theta < 1.0)) fail(Errc::InvalidArgument, "theta must be in (0,1)");
  if (!(cfg.delta > 0.0 && cfg.delta < 0.5)) fail(Errc::InvalidArgument, "delta must be in (0,0.5)");
}

Verdict compare(double p, double theta) { return p >= theta ? Verdict::Above : Verdict::Below; }

Decision run_naive(const dist::Distribution& d, double c, double theta, std::size_t budget,
                   std::uint64_t key) {
  ScalarDrawer draw(d, key);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < budget; ++i)
    if (draw() > c) ++hits;
  const double p = static_cast<double>(hits) / static_cast<double>(budget);
  return {compare(p, theta), budget, p};
}

// Quantile restricted to a known bracket [lo, hi].
double quantile_in(const dist::Distribution& d, double u, double lo, double hi) {
  if (std::holds_alternative<dist::Histogram>(d)) return dist::quantile(d, u);
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (dist::cdf(d, mid) < u)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

Decision run_stratified(const dist::Distribution& d, double c, double theta, std::size_t budget,
                        std::size_t strata, std::uint64_t key) {
  const std::size_t S = std::min(strata, budget);
  CounterRng rng(key);
  // Stratum s covers quantile levels [s/S, (s+1)/S).
  std::vector<double> bounds(S + 1);
  const auto [lo, hi] = dist::support(d);
  bounds.front() = lo - 32.0 * (hi - lo);
  bounds.back() = hi + 32.0 * (hi - lo);
  for (std::size_t s = 1; s < S; ++s)
    bounds[s] = dist::quantile(d, static_cast<double>(s) / static_cast<double>(S));

  double estimate = 0.0;
  for (std::size_t s = 0; s < S; ++s) {
    const std::size_t n_s = budget / S + (s < budget % S ? 1 : 0);
    std::size_t hits = 0;
    if (bounds[s] > c) {
      hits = n_s;  // every draw from this stratum lies above c
      for (std::size_t i = 0; i < n_s; ++i) (void)rng();
    } else if (bounds[s + 1] <= c) {
      for (std::size_t i = 0; i < n_s; ++i) (void)rng();
    } else {
      for (std::size_t i = 0; i < n_s; ++i) {
        const double u = (static_cast<double>(s) + rng.uniform()) / static_cast<double>(S);
        const double level = std::clamp(u, 1e-15, 1.0 - 1e-15);
        if (quantile_in(d, level, bounds[s], bounds[s + 1]) > c) ++hits;
      }
    }
    estimate += static_cast<double>(hits) / static_cast<double>(n_s) / static_cast<double>(S);
  }
  return {compare(estimate, theta), budget, estimate};
}

Decision run_sprt(const dist::Distribution& d, double c, double theta, const SamplerConfig& cfg,
                  std::size_t budget, std::uint64_t key) {
  constexpr double kEdge = 1e-6;
  const double p0 = std::clamp(theta - cfg.delta, kEdge, 1.0 - kEdge);
  const double p1 = std::clamp(theta + cfg.delta, kEdge, 1.0 - kEdge);
  const double up = std::log(p1 / p0);
  const double down = std::log((1.0 - p1) / (1.0 - p0));
  const double accept_h1 = std::log((1.0 - cfg.beta) / cfg.alpha);
  const double accept_h0 = std::log(cfg.beta / (1.0 - cfg.alpha));

  ScalarDrawer draw(d, key);
  double llr = 0.0;
  std::size_t hits = 0;
  for (std::size_t n = 1; n <= budget; ++n) {
    if (draw() > c) {
      ++hits;
      llr += up;
    } else {
      llr += down;
    }
    const double p = static_cast<double>(hits) / static_cast<double>(n);
    if (llr >= accept_h1) return {Verdict::Above, n, p};
    if (llr <= accept_h0) return {Verdict::Below, n, p};
  }
  return {Verdict::Undecided, budget,
          static_cast<double>(hits) / static_cast<double>(std::max<std::size_t>(1, budget))};
}

bool straddles(double p, std::size_t n, double theta) {
  const auto w = wilson(p, n);
  return w.lo <= theta && theta <= w.hi;
}

}  // namespace

WilsonInterval wilson(double p_hat, std::size_t n, double z) {
  const double nn = static_cast<double>(n);
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p_hat + z2 / (2.0 * nn)) / denom;
  const double half = z / denom * std::sqrt(p_hat * (1.0 - p_hat) / nn + z2 / (4.0 * nn * nn));
  return {center - half, center + half};
}

std::vector<double> sample(const dist::Distribution& d, std::size_t n, std::uint64_t seed) {
  const std::uint64_t key = derive_stream(seed, StreamTag::Sample, 0);
  if (const auto* dir = std::get_if<dist::Dirichlet>(&d)) {
    CounterRng rng(key);
    const std::size_t m = dir->alphas.size();
    std::vector<std::gamma_distribution<double>> gammas;
    for (double a : dir->alphas) gammas.emplace_back(a, 1.0);
    std::vector<double> out(n * m);
    for (std::size_t i = 0; i < n; ++i) {
      double total = 0.0;
      for (std::size_t j = 0; j < m; ++j) total += out[i * m + j] = gammas[j](rng);
      for (std::size_t j = 0; j < m; ++j) out[i * m + j] /= total;
    }
    return out;
  }
  if (const auto* g = std::get_if<dist::Gmm>(&d); g && g->dim() > 1) {
    CounterRng rng(key);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> cum;
    double acc = 0.0;
    for (double w : g->weights) cum.push_back(acc += w);
    const std::size_t dim = g->dim();
    std::vector<double> out(n * dim);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = rng.uniform() * cum.back();
      std::size_t k = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
      k = std::min(k, cum.size() - 1);
      const auto& c = g->components[k];
      for (std::size_t j = 0; j < dim; ++j)
        out[i * dim + j] = c.mean[j] + std::sqrt(c.var[j]) * normal(rng);
    }
    return out;
  }
  ScalarDrawer draw(d, key);
  std::vector<double> out(n);
  for (auto& x : out) x = draw();
  return out;
}

Decision mc_threshold(const dist::Distribution& d, double c, double theta,
                      const SamplerConfig& cfg) {
  check_config(cfg, theta);
  const std::uint64_t key = derive_stream(cfg.seed, StreamTag::Threshold, 0);
  switch (cfg.strategy) {
    case Strategy::Naive: return run_naive(d, c, theta, cfg.budget, key);
    case Strategy::Stratified: return run_stratified(d, c, theta, cfg.budget, cfg.strata, key);
    case Strategy::Sprt: return run_sprt(d, c, theta, cfg, cfg.budget, key);
    case Strategy::Cascade: break;
  }
  // Cascade: naive (10%) -> stratified (30%) -> SPRT (rest), escalating while
  // the Wilson 95% interval of the current estimate contains theta.
  const std::size_t b1 = std::max<std::size_t>(1, cfg.budget / 10);
  Decision d1 = run_naive(d, c, theta, b1, derive_stream(key, StreamTag::Threshold, 1));
  if (!straddles(d1.estimate, b1, theta) || b1 >= cfg.budget) return d1;

  const std::size_t b2 = std::max<std::size_t>(1, std::min(cfg.budget - b1, 3 * cfg.budget / 10));
  Decision d2 = run_stratified(d, c, theta, b2, cfg.strata, derive_stream(key, StreamTag::Threshold, 2));
  d2.samples_used += b1;
  if (!straddles(d2.estimate, b2, theta) || b1 + b2 >= cfg.budget) return d2;

  Decision d3 = run_sprt(d, c, theta, cfg, cfg.budget - b1 - b2,
                         derive_stream(key, StreamTag::Threshold, 3));
  d3.samples_used += b1 + b2;
  return d3;
}

double mc_jsd(const dist::Distribution& a, const dist::Distribution& b, std::size_t n,
              std::uint64_t seed) {
  if (dist::dimension(a) != 1 || dist::dimension(b) != 1 ||
      std::holds_alternative<dist::Dirichlet>(a) || std::holds_alternative<dist::Dirichlet>(b))
    fail(Errc::DimensionMismatch, "mc_jsd needs 1-dimensional inputs");
  if (n < 2) fail(Errc::InvalidArgument, "mc_jsd needs n >= 2");

  auto densities = [](const dist::Distribution& d, std::span<const double> xs, std::span<double> out) {
    if (const auto* g = std::get_if<dist::Gmm>(&d)) {
      std::vector<double> mu(g->size()), var(g->size());
      for (std::size_t k = 0; k < g->size(); ++k) {
        mu[k] = g->components[k].mean[0];
        var[k] = g->components[k].var[0];
      }
      simd::mixture_pdf(xs, g->weights, mu, var, out);
    } else {
      for (std::size_t i = 0; i < xs.size(); ++i) out[i] = dist::pdf(d, xs[i]);
    }
  };

  // Mean of log(2 p_self / (p_self + p_other)) over draws from self.
  auto half_kl = [&](const dist::Distribution& self, const dist::Distribution& other,
                     std::size_t count, std::uint64_t key) {
    ScalarDrawer draw(self, key);
    std::vector<double> xs(count), ps(count), qs(count);
    for (auto& x : xs) x = draw();
    densities(self, xs, ps);
    densities(other, xs, qs);
    std::vector<double> ratio(count);
    for (std::size_t i = 0; i < count; ++i) {
      const double s = ps[i] + qs[i];
      ratio[i] = (ps[i] > 0.0 && s > 0.0) ? 2.0 * ps[i] / s : 1.0;
    }
    simd::log(ratio, ratio);
    double acc = 0.0;
    for (double r : ratio) acc += r;
    return acc / static_cast<double>(count);
  };

  const std::size_t na = n / 2;
  const std::size_t nb = n - na;
  const double kl_a = half_kl(a, b, na, derive_stream(seed, StreamTag::Jsd, 0));
  const double kl_b = half_kl(b, a, nb, derive_stream(seed, StreamTag::Jsd, 1));
  return 0.5 * (kl_a + kl_b);
}

}  // namespace probkg::mc
