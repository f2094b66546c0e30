#include "fpld/rng.hpp"

#include <array>

namespace fpld {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

RandomStream block_stream(std::uint64_t seed, std::uint64_t block) {
  std::array<std::uint32_t, 8> words{};
  for (std::uint64_t i = 0; i < 4; ++i) {
    const std::uint64_t w = splitmix64(seed + (4 * block + i + 1) * kGolden);
    words[2 * i] = static_cast<std::uint32_t>(w);
    words[2 * i + 1] = static_cast<std::uint32_t>(w >> 32);
  }
  std::seed_seq seq(words.begin(), words.end());
  return RandomStream(seq);
}

}  // namespace fpld
