#pragma once

// Per-timestep variational autoencoder. Every row of the input is one
// zero-filled observation vector; rows are independent, so a whole batch of
// sequences is encoded at once as a (T*B) x D matrix.

#include <cstddef>
#include <random>
#include <vector>

#include "vrin/graph.hpp"
#include "vrin/parameters.hpp"

namespace vrin::vae {

struct VaeShape {
    std::size_t features = 0;
    std::size_t latent = 0;
    std::vector<std::size_t> hidden;  // encoder widths; decoder mirrors them
};

// Registers encoder/decoder weights under "vae.".
void add_parameters(ParameterStore& store, const VaeShape& shape, std::mt19937_64& rng);

struct DenseLayer {
    ad::NodeId weight;
    ad::NodeId bias;
};

struct VaeBinding {
    std::vector<DenseLayer> encoder;
    DenseLayer latent_mean;
    DenseLayer latent_log_var;
    std::vector<DenseLayer> decoder;
    DenseLayer recon_mean;
    DenseLayer recon_log_var;
    std::vector<ad::NodeId> all;  // every bound VAE parameter, for the l1 penalty
};

VaeBinding bind(ad::Graph& graph, const ParameterStore& store, const VaeShape& shape);

// Dropout after each hidden tanh when `rate > 0` and a generator is given.
struct Stochastic {
    double dropout_rate = 0.0;
    std::mt19937_64* dropout_rng = nullptr;
};

struct LatentDistribution {
    ad::NodeId mean;
    ad::NodeId log_var;  // clamped
};

struct ReconDistribution {
    ad::NodeId mean;
    ad::NodeId log_var;  // clamped
};

LatentDistribution encode(ad::Graph& graph, const VaeBinding& vae, ad::NodeId x, const Stochastic& stochastic,
                          double log_var_clamp);

// z = mean + exp(log_var / 2) * noise; `noise` matches the latent shape.
ad::NodeId reparameterize(ad::Graph& graph, const LatentDistribution& q, const Tensor& noise);

ReconDistribution decode(ad::Graph& graph, const VaeBinding& vae, ad::NodeId z, const Stochastic& stochastic,
                         double log_var_clamp);

struct MergedEstimate {
    ad::NodeId merged;       // observed values kept, decoder mean elsewhere
    ad::NodeId uncertainty;  // decoder std on missing entries, 0 on observed
};

// x_bar = m * x + (1 - m) * mean;  u_bar = (1 - m) * exp(log_var / 2)
MergedEstimate merge_and_uncertainty(ad::Graph& graph, const Tensor& x_tilde, const Tensor& mask,
                                     ad::NodeId recon_mean, ad::NodeId recon_log_var);

}  // namespace vrin::vae
