#pragma once

#include <cstdint>
#include <random>

namespace relgrid {

// splitmix64 step; used to derive decorrelated RNG streams from one seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Deterministic per-observable stream: same (seed, stream_id) always yields
// the same generator state, distinct ids yield independent streams.
inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t stream_id) {
    return splitmix64(seed ^ splitmix64(stream_id));
}

inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream_id) {
    return std::mt19937_64(derive_stream_seed(seed, stream_id));
}

}  // namespace relgrid
