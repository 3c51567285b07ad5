#pragma once

// Shared fixtures for the test binaries.

#include <random>

#include "vrin/config.hpp"
#include "vrin/data.hpp"
#include "vrin/model.hpp"

namespace vrin::testing {

// Zero-filled batch with i.i.d. missingness; every sample keeps at least
// one observation at t = 0 so each variable's gap is well defined.
inline MaskedBatch random_batch(std::size_t n, std::size_t t, std::size_t d, double missing, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    MaskedBatch b(n, t, d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t s = 0; s < t; ++s) {
            b.timestamps[i * t + s] = static_cast<double>(s);
            for (std::size_t k = 0; k < d; ++k) {
                const auto o = b.offset(i, s, k);
                if (unit(rng) >= missing || (s == 0 && k == 0)) {
                    b.mask[o] = 1.0;
                    b.values[o] = normal(rng);
                }
            }
        }
        b.labels[i] = static_cast<int>(i % 2);
        b.patient_ids[i] = "p" + std::to_string(i);
    }
    rebuild_delta(b);
    return b;
}

// Small dimensions so gradient checks stay fast.
inline TrainConfig small_config(std::size_t features, std::size_t hidden = 8, std::size_t latent = 3) {
    TrainConfig c = TrainConfig::preset(Task::Classification);
    c.features = features;
    c.hidden = hidden;
    c.latent = latent;
    c.vae_hidden = {6, 4};
    c.dropout = 0.0;
    c.batch_size = 4;
    c.epochs = 1;
    return c;
}

}  // namespace vrin::testing
