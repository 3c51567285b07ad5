#pragma once

#include <optional>
#include <random>
#include <vector>

#include "vrin/config.hpp"
#include "vrin/data.hpp"
#include "vrin/graph.hpp"
#include "vrin/objectives.hpp"
#include "vrin/parameters.hpp"
#include "vrin/recurrent.hpp"
#include "vrin/vae.hpp"

namespace vrin {

// Learned parameters together with the normalization they were fit under.
struct Model {
    TrainConfig config;
    ParameterStore params;
    NormStats stats;
};

vae::VaeShape vae_shape(const TrainConfig& config);
rnn::CellShape cell_shape(const TrainConfig& config);

// VAE under "vae.", forward cell under "fwd.", backward cell under "bwd."
// when bidirectional.
void init_parameters(ParameterStore& store, const TrainConfig& config, std::mt19937_64& rng);
Model initialize_model(const TrainConfig& config, NormStats stats);

// Time-reversed copy; timestamps become s'_t = s_{T-1} - s_{T-1-t} and the
// gaps are rebuilt from the reversed mask.
MaskedBatch reverse_time(const MaskedBatch& batch);

// Per-step [B, D] blocks plus the stacked (T*B) x D matrices, row t*B + n.
struct TimeMajor {
    std::vector<Tensor> x_tilde;
    std::vector<Tensor> mask;
    std::vector<Tensor> delta;
    Tensor x_all;
    Tensor mask_all;
};

TimeMajor time_major(const MaskedBatch& batch);

struct ForwardOptions {
    // Enables dropout (needs `dropout_rng`).
    bool training = false;
    std::mt19937_64* dropout_rng = nullptr;
    // Reparameterization noise, (T*B) x latent. Null means zero noise, i.e.
    // the posterior mean.
    const Tensor* latent_noise = nullptr;
};

struct ForwardPass {
    ad::NodeId l_vae, l_reg, l_pred, l_cons, l_total, l1_penalty;
    bool reg_without_observations = false;

    vae::LatentDistribution latent;
    vae::ReconDistribution recon;
    ad::NodeId x_bar;        // (T*B) x D
    ad::NodeId u_bar;        // (T*B) x D
    std::vector<ad::NodeId> completed;  // per step [B, D]; mean of both directions when bidirectional
    ad::NodeId logit;        // [B, 1]
    ad::NodeId probability;  // [B, 1]

    rnn::Unrolled forward;
    std::optional<rnn::BidirectionalUnrolled> bidirectional;
};

// One full pass: VAE over every step, recurrent imputation, composite loss.
ForwardPass forward(ad::Graph& graph, const ParameterStore& params, const TrainConfig& config,
                    const MaskedBatch& batch, const ForwardOptions& options);

LossBreakdown read_losses(const ad::Graph& graph, const ForwardPass& pass);

}  // namespace vrin
