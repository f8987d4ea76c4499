#pragma once

#include <cstdint>
#include <random>

namespace madlab {

using Rng = std::mt19937_64;

// Independent streams inside one replication. Unit draws live on their own
// stream so that changing the policy never changes the potential outcomes.
enum class Stream : std::uint64_t {
    units = 1,
    assignment = 2,
    policy = 3,
    replay = 4,
};

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Seed for (master, replication, stream). Order of evaluation across
// replications cannot influence any stream.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replication,
                                 Stream stream) {
    std::uint64_t s = master;
    std::uint64_t a = splitmix64(s);
    s = a ^ (replication * 0xD1B54A32D192ED03ULL);
    std::uint64_t b = splitmix64(s);
    s = b ^ (static_cast<std::uint64_t>(stream) * 0x8CB92BA72F3D8DD7ULL);
    return splitmix64(s);
}

inline Rng make_stream(std::uint64_t master, std::uint64_t replication, Stream stream) {
    return Rng(derive_seed(master, replication, stream));
}

// Uniform on [0, 1) with 53 random bits; independent of the standard
// library's distribution implementation.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace madlab
