#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "probkg/dist/distribution.hpp"

namespace probkg::mc {

enum class Strategy { Naive, Stratified, Sprt, Cascade };

Strategy parse_strategy(std::string_view name);
std::string_view strategy_name(Strategy s) noexcept;

struct SamplerConfig {
  Strategy strategy = Strategy::Naive;
  std::size_t budget = 10000;
  double alpha = 0.05;
  double beta = 0.05;
  std::size_t strata = 16;
  std::uint64_t seed = 42;
  /// SPRT indifference half-width around theta.
  double delta = 0.02;
};

enum class Verdict { Above, Below, Undecided };

std::string_view verdict_name(Verdict v) noexcept;

struct Decision {
  Verdict verdict = Verdict::Undecided;
  std::size_t samples_used = 0;
  double estimate = 0.0;
};

/// n i.i.d. draws, row-major (n x dim). Deterministic in (d, n, seed).
std::vector<double> sample(const dist::Distribution& d, std::size_t n, std::uint64_t seed);

/// Decides P(X > c) >= theta by sampling.
Decision mc_threshold(const dist::Distribution& d, double c, double theta,
                      const SamplerConfig& cfg);

/// Monte Carlo Jensen-Shannon estimate: n/2 draws from each side, log
/// density ratios against the midpoint mixture.
double mc_jsd(const dist::Distribution& a, const dist::Distribution& b, std::size_t n,
              std::uint64_t seed);

/// Wilson score interval at z.
struct WilsonInterval {
  double lo;
  double hi;
};
WilsonInterval wilson(double p_hat, std::size_t n, double z = 1.959963984540054);

}  // namespace probkg::mc
