#include "vrin/model.hpp"

#include "vrin/errors.hpp"
#include "vrin/rng.hpp"

namespace vrin {

vae::VaeShape vae_shape(const TrainConfig& c) { return {c.features, c.latent, c.vae_hidden}; }

rnn::CellShape cell_shape(const TrainConfig& c) { return {c.features, c.hidden}; }

void init_parameters(ParameterStore& store, const TrainConfig& config, std::mt19937_64& rng) {
    if (config.features == 0) throw ShapeError("model: feature count must be known before initialization");
    vae::add_parameters(store, vae_shape(config), rng);
    rnn::add_parameters(store, cell_shape(config), "fwd.", rng);
    if (config.direction == Direction::Bi) rnn::add_parameters(store, cell_shape(config), "bwd.", rng);
}

Model initialize_model(const TrainConfig& config, NormStats stats) {
    Model m{config, {}, std::move(stats)};
    RngStreams streams(config.seed);
    init_parameters(m.params, config, streams.init);
    return m;
}

MaskedBatch reverse_time(const MaskedBatch& batch) {
    MaskedBatch out = batch;
    const std::size_t T = batch.steps, D = batch.features;
    for (std::size_t n = 0; n < batch.samples; ++n) {
        const double last = batch.timestamps[n * T + T - 1];
        for (std::size_t t = 0; t < T; ++t) {
            const std::size_t src = T - 1 - t;
            out.timestamps[n * T + t] = last - batch.timestamps[n * T + src];
            for (std::size_t d = 0; d < D; ++d) {
                out.values[out.offset(n, t, d)] = batch.values[batch.offset(n, src, d)];
                out.mask[out.offset(n, t, d)] = batch.mask[batch.offset(n, src, d)];
            }
        }
    }
    rebuild_delta(out);
    return out;
}

TimeMajor time_major(const MaskedBatch& b) {
    const std::size_t N = b.samples, T = b.steps, D = b.features;
    TimeMajor tm;
    tm.x_all = Tensor({T * N, D}, 0.0);
    tm.mask_all = Tensor({T * N, D}, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        Tensor x({N, D}, 0.0), m({N, D}, 0.0), dl({N, D}, 0.0);
        for (std::size_t n = 0; n < N; ++n) {
            for (std::size_t d = 0; d < D; ++d) {
                const auto o = b.offset(n, t, d);
                x.at(n, d) = b.values[o];
                m.at(n, d) = b.mask[o];
                dl.at(n, d) = b.delta[o];
                tm.x_all.at(t * N + n, d) = b.values[o];
                tm.mask_all.at(t * N + n, d) = b.mask[o];
            }
        }
        tm.x_tilde.push_back(std::move(x));
        tm.mask.push_back(std::move(m));
        tm.delta.push_back(std::move(dl));
    }
    return tm;
}

namespace {

// Rows [t*B, (t+1)*B) of a stacked matrix, one node per step.
std::vector<ad::NodeId> split_steps(ad::Graph& g, ad::NodeId stacked, std::size_t steps, std::size_t batch) {
    std::vector<ad::NodeId> out;
    out.reserve(steps);
    for (std::size_t t = 0; t < steps; ++t) out.push_back(g.slice_rows(stacked, t * batch, batch));
    return out;
}

}  // namespace

ForwardPass forward(ad::Graph& g, const ParameterStore& params, const TrainConfig& config, const MaskedBatch& batch,
                    const ForwardOptions& options) {
    if (batch.features != config.features) {
        throw MismatchError("model expects " + std::to_string(config.features) + " features, batch has " +
                            std::to_string(batch.features));
    }
    const std::size_t B = batch.samples, T = batch.steps;
    if (B == 0 || T == 0) throw ShapeError("forward: empty batch");
    const bool gated = config.variant == Variant::VRinFull;
    const bool bidirectional = config.direction == Direction::Bi;

    ForwardPass pass;
    const TimeMajor tm = time_major(batch);

    // VAE over every (t, n) row at once.
    const auto vae_binding = vae::bind(g, params, vae_shape(config));
    vae::Stochastic stochastic;
    if (options.training) stochastic = {config.dropout, options.dropout_rng};
    auto x_all = g.constant(tm.x_all);
    pass.latent = vae::encode(g, vae_binding, x_all, stochastic, config.log_var_clamp);
    Tensor noise = options.latent_noise ? *options.latent_noise : Tensor(g.value(pass.latent.mean).shape(), 0.0);
    if (noise.shape() != g.value(pass.latent.mean).shape()) {
        throw ShapeError("forward: latent noise " + shape_string(noise.shape()) + " does not match " +
                         shape_string(g.value(pass.latent.mean).shape()));
    }
    auto z = vae::reparameterize(g, pass.latent, noise);
    pass.recon = vae::decode(g, vae_binding, z, stochastic, config.log_var_clamp);
    auto merged = vae::merge_and_uncertainty(g, tm.x_all, tm.mask_all, pass.recon.mean, pass.recon.log_var);
    pass.x_bar = merged.merged;
    pass.u_bar = merged.uncertainty;

    rnn::SequenceInputs fwd_in{tm.x_tilde, tm.mask, tm.delta, split_steps(g, pass.x_bar, T, B),
                               split_steps(g, pass.u_bar, T, B)};
    const auto fwd_cell = rnn::bind(g, params, cell_shape(config), "fwd.");

    ad::NodeId reg;
    Tensor labels({B, 1}, 0.0);
    for (std::size_t n = 0; n < B; ++n) labels[n] = static_cast<double>(batch.labels[n]);

    if (!bidirectional) {
        pass.forward = rnn::unroll(g, fwd_cell, fwd_in, gated);
        pass.completed = pass.forward.trace.completed;
        pass.logit = pass.forward.prediction.logit;
        pass.probability = pass.forward.prediction.probability;
        auto r = loss::loss_reg(g, tm.x_all, tm.mask_all, g.concat_rows(pass.forward.trace.combined));
        reg = r.value;
        pass.reg_without_observations = r.no_observations;
        pass.l_cons = g.constant(Tensor::scalar(0.0));
    } else {
        const TimeMajor rev = time_major(reverse_time(batch));
        rnn::SequenceInputs bwd_in{rev.x_tilde, rev.mask, rev.delta, {}, {}};
        for (std::size_t t = 0; t < T; ++t) {
            bwd_in.x_bar.push_back(fwd_in.x_bar[T - 1 - t]);
            bwd_in.u_bar.push_back(fwd_in.u_bar[T - 1 - t]);
        }
        const auto bwd_cell = rnn::bind(g, params, cell_shape(config), "bwd.");
        auto bi = rnn::bidirectional_unroll(g, fwd_cell, bwd_cell, fwd_in, bwd_in, gated);
        pass.forward = bi.forward;
        for (std::size_t t = 0; t < T; ++t) {
            pass.completed.push_back(g.scale(g.add(bi.forward.trace.completed[t], bi.backward_completed[t]), 0.5));
        }
        pass.logit = bi.prediction.logit;
        pass.probability = bi.prediction.probability;
        auto rf = loss::loss_reg(g, tm.x_all, tm.mask_all, g.concat_rows(bi.forward.trace.combined));
        auto rb = loss::loss_reg(g, tm.x_all, tm.mask_all, g.concat_rows(bi.backward_combined));
        reg = g.scale(g.add(rf.value, rb.value), 0.5);
        pass.reg_without_observations = rf.no_observations;
        pass.l_cons = loss::loss_consistency(g, g.concat_rows(bi.forward.trace.completed),
                                             g.concat_rows(bi.backward_completed));
        pass.bidirectional = std::move(bi);
    }
    pass.l_reg = reg;

    const Tensor& recon_weight =
        config.recon_likelihood == ReconLikelihood::ObservedOnly ? tm.mask_all : Tensor(tm.mask_all.shape(), 1.0);
    auto log_lik = loss::gaussian_log_likelihood(g, tm.x_all, pass.recon.mean, pass.recon.log_var, recon_weight);
    auto kl = loss::kl_diag_gaussian(g, pass.latent.mean, pass.latent.log_var);
    auto vae_loss = loss::loss_vae(g, log_lik, kl, vae_binding.all, config.lambda1);
    pass.l_vae = vae_loss.total;
    pass.l1_penalty = vae_loss.penalty;
    pass.l_pred = loss::loss_pred(g, pass.logit, labels);
    pass.l_total = loss::loss_total(g, {pass.l_vae, pass.l_reg, pass.l_pred, pass.l_cons}, config.alpha, config.beta,
                                    config.xi, config.direction);
    return pass;
}

LossBreakdown read_losses(const ad::Graph& g, const ForwardPass& p) {
    return {g.value(p.l_vae).item(),  g.value(p.l_reg).item(),   g.value(p.l_pred).item(),
            g.value(p.l_cons).item(), g.value(p.l_total).item(), g.value(p.l1_penalty).item()};
}

}  // namespace vrin
