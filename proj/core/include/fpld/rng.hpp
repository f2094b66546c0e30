#pragma once

#include <cstdint>
#include <random>

namespace fpld {

using RandomStream = std::mt19937_64;

/// SplitMix64 finalizer. Bijective on 64-bit words.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Stream for replication block `block` of a run seeded with `seed`.
///
/// The engine state is filled through std::seed_seq from four words
/// splitmix64(seed + (4 * block + i + 1) * golden), i = 0..3, so distinct
/// (seed, block) pairs give unrelated streams and the mapping is fixed
/// across platforms.
RandomStream block_stream(std::uint64_t seed, std::uint64_t block);

}  // namespace fpld
