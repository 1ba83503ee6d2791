#pragma once

#include <cstdint>
#include <limits>

namespace probkg::mc {

/// Counter-based generator: the i-th output is a bijective mix of
/// key + i * golden_gamma, so any stream can be split off by deriving a key.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept { return mix(key_ + (++counter_) * kGamma); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  static std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Operation tags used when deriving streams from a root seed.
enum class StreamTag : std::uint64_t {
  Sample = 1,
  Threshold = 2,
  Jsd = 3,
  Filter = 4,
  Generate = 5,
  BoxInit = 6,
  Corpus = 7,
};

/// Key of the independent stream for (operation, item) under a root seed.
std::uint64_t derive_stream(std::uint64_t root, StreamTag tag, std::uint64_t item) noexcept;

}  // namespace probkg::mc
