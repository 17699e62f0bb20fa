#include "qustat/random.hpp"

namespace qustat {

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finaliser over a Weyl-sequence combination of seed and index.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace qustat
