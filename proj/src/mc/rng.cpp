#include "probkg/mc/rng.hpp"

namespace probkg::mc {

std::uint64_t derive_stream(std::uint64_t root, StreamTag tag, std::uint64_t item) noexcept {
  std::uint64_t k = CounterRng::mix(root + CounterRng::kGamma);
  k = CounterRng::mix(k ^ (static_cast<std::uint64_t>(tag) * 0xd1b54a32d192ed03ULL));
  return CounterRng::mix(k + (item + 1) * CounterRng::kGamma);
}

}  // namespace probkg::mc
