#pragma once

#include <cstdint>
#include <random>

namespace vrin {

// Independent generators for the four sources of randomness in training.
// Each is derived from the run seed through a fixed salt so one stream's
// consumption never shifts another.
struct RngStreams {
    explicit RngStreams(std::uint64_t seed);

    std::mt19937_64 init;
    std::mt19937_64 dropout;
    std::mt19937_64 noise;
    std::mt19937_64 shuffle;
};

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace vrin
