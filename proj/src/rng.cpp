#include "vrin/rng.hpp"

namespace vrin {

// splitmix64 finalizer
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

RngStreams::RngStreams(std::uint64_t seed)
    : init(derive_seed(seed, 1)),
      dropout(derive_seed(seed, 2)),
      noise(derive_seed(seed, 3)),
      shuffle(derive_seed(seed, 4)) {}

}  // namespace vrin
