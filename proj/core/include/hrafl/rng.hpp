#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace hrafl {

using Rng = std::mt19937_64;

// Deterministically mixes a seed with a path of integers (run, round,
// client, ...) into a new 64-bit seed. Independent of call order.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

// Engine seeded from derive_seed(seed, path).
Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

// Stream tags used as the first path element so that unrelated consumers
// of the same seed never share a stream.
namespace stream {
inline constexpr std::uint64_t kRun = 0x52554e;          // per-run seed
inline constexpr std::uint64_t kData = 0x44415441;       // synthetic data
inline constexpr std::uint64_t kPartition = 0x50415254;  // client partition
inline constexpr std::uint64_t kRoster = 0x524f5354;     // attack roster
inline constexpr std::uint64_t kClient = 0x434c4e54;     // per-client attacks
inline constexpr std::uint64_t kSybil = 0x5359424c;      // colluding sybils
inline constexpr std::uint64_t kSplit = 0x53504c54;      // csv train/test split
}  // namespace stream

}  // namespace hrafl
