#pragma once

#include <cstddef>
#include <functional>

namespace probkg {

/// Worker count used by parallel sections. Defaults to the hardware
/// concurrency; 0 restores the default.
void set_thread_count(std::size_t n) noexcept;
std::size_t thread_count() noexcept;

/// Splits [0, n) into contiguous chunks, one per worker, and runs
/// fn(chunk_index, begin, end) for each. Chunk boundaries depend only on n
/// and the chunk count, so per-chunk results can be merged in a fixed order.
void parallel_chunks(
    std::size_t n, std::size_t chunks,
    const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

}  // namespace probkg
