#pragma once

#include <cstdint>
#include <random>

namespace qustat {

/// Replicates per work unit of parallel_chunks.
inline constexpr std::size_t kChunkSize = 4096;

/// Seed of the independent stream for replicate `index`. Streams depend only
/// on (seed, index), so results do not depend on scheduling.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index);

inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(stream_seed(seed, index));
}

/// Runs body(begin, end, chunk) over [0, count) in contiguous chunks on up to
/// `threads` threads. Chunk boundaries depend only on count and chunk size.
template <class Body>
void parallel_chunks(std::size_t count, int threads, Body&& body);

}  // namespace qustat

#include <algorithm>
#include <thread>
#include <vector>

namespace qustat {

template <class Body>
void parallel_chunks(std::size_t count, int threads, Body&& body) {
  constexpr std::size_t kChunk = kChunkSize;
  const std::size_t chunks = (count + kChunk - 1) / kChunk;
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(threads > 0 ? threads : 1, chunks));
  auto run = [&](std::size_t w) {
    for (std::size_t c = w; c < chunks; c += workers)
      body(c * kChunk, std::min(count, (c + 1) * kChunk), c);
  };
  if (workers == 1) {
    run(0);
    return;
  }
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
  for (auto& t : pool) t.join();
}

}  // namespace qustat
