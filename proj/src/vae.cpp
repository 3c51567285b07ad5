#include "vrin/vae.hpp"

#include <string>

#include "vrin/errors.hpp"

namespace vrin::vae {

namespace {

void add_dense(ParameterStore& store, const std::string& name, std::size_t in, std::size_t out,
               std::mt19937_64& rng) {
    store.add(name + ".w", init_weight(out, in, rng));
    store.add(name + ".b", Tensor({out}, 0.0));
}

DenseLayer bind_dense(ad::Graph& g, const ParameterStore& store, const std::string& name,
                      std::vector<ad::NodeId>& all) {
    DenseLayer layer{g.parameter(store, store.index(name + ".w")), g.parameter(store, store.index(name + ".b"))};
    all.push_back(layer.weight);
    all.push_back(layer.bias);
    return layer;
}

ad::NodeId hidden_layer(ad::Graph& g, const DenseLayer& layer, ad::NodeId x, const Stochastic& s) {
    auto h = g.tanh(g.linear(x, layer.weight, layer.bias));
    if (s.dropout_rate > 0.0 && s.dropout_rng != nullptr) h = g.dropout(h, s.dropout_rate, *s.dropout_rng);
    return h;
}

}  // namespace

void add_parameters(ParameterStore& store, const VaeShape& shape, std::mt19937_64& rng) {
    if (shape.features == 0 || shape.latent == 0) throw ShapeError("vae: features and latent must be positive");
    std::size_t in = shape.features;
    for (std::size_t i = 0; i < shape.hidden.size(); ++i) {
        add_dense(store, "vae.enc" + std::to_string(i), in, shape.hidden[i], rng);
        in = shape.hidden[i];
    }
    add_dense(store, "vae.z_mean", in, shape.latent, rng);
    add_dense(store, "vae.z_log_var", in, shape.latent, rng);
    in = shape.latent;
    for (std::size_t i = shape.hidden.size(); i-- > 0;) {
        add_dense(store, "vae.dec" + std::to_string(shape.hidden.size() - 1 - i), in, shape.hidden[i], rng);
        in = shape.hidden[i];
    }
    add_dense(store, "vae.x_mean", in, shape.features, rng);
    add_dense(store, "vae.x_log_var", in, shape.features, rng);
}

VaeBinding bind(ad::Graph& g, const ParameterStore& store, const VaeShape& shape) {
    VaeBinding b;
    for (std::size_t i = 0; i < shape.hidden.size(); ++i) {
        b.encoder.push_back(bind_dense(g, store, "vae.enc" + std::to_string(i), b.all));
    }
    b.latent_mean = bind_dense(g, store, "vae.z_mean", b.all);
    b.latent_log_var = bind_dense(g, store, "vae.z_log_var", b.all);
    for (std::size_t i = 0; i < shape.hidden.size(); ++i) {
        b.decoder.push_back(bind_dense(g, store, "vae.dec" + std::to_string(i), b.all));
    }
    b.recon_mean = bind_dense(g, store, "vae.x_mean", b.all);
    b.recon_log_var = bind_dense(g, store, "vae.x_log_var", b.all);
    return b;
}

LatentDistribution encode(ad::Graph& g, const VaeBinding& vae, ad::NodeId x, const Stochastic& s,
                          double log_var_clamp) {
    auto h = x;
    for (const auto& layer : vae.encoder) h = hidden_layer(g, layer, h, s);
    auto mean = g.linear(h, vae.latent_mean.weight, vae.latent_mean.bias);
    auto log_var = g.clamp(g.linear(h, vae.latent_log_var.weight, vae.latent_log_var.bias), -log_var_clamp,
                           log_var_clamp);
    return {mean, log_var};
}

ad::NodeId reparameterize(ad::Graph& g, const LatentDistribution& q, const Tensor& noise) {
    auto sigma = g.exp(g.scale(q.log_var, 0.5));
    return g.add(q.mean, g.mul(sigma, g.constant(noise)));
}

ReconDistribution decode(ad::Graph& g, const VaeBinding& vae, ad::NodeId z, const Stochastic& s,
                         double log_var_clamp) {
    auto h = z;
    for (const auto& layer : vae.decoder) h = hidden_layer(g, layer, h, s);
    auto mean = g.linear(h, vae.recon_mean.weight, vae.recon_mean.bias);
    auto log_var =
        g.clamp(g.linear(h, vae.recon_log_var.weight, vae.recon_log_var.bias), -log_var_clamp, log_var_clamp);
    return {mean, log_var};
}

MergedEstimate merge_and_uncertainty(ad::Graph& g, const Tensor& x_tilde, const Tensor& mask,
                                     ad::NodeId recon_mean, ad::NodeId recon_log_var) {
    Tensor observed(x_tilde.shape(), 0.0);
    Tensor missing(mask.shape(), 0.0);
    for (std::size_t i = 0; i < mask.size(); ++i) {
        observed[i] = mask[i] * x_tilde[i];
        missing[i] = 1.0 - mask[i];
    }
    auto merged = g.add(g.constant(std::move(observed)), g.mul_const(recon_mean, missing));
    auto sigma = g.exp(g.scale(recon_log_var, 0.5));
    auto uncertainty = g.mul_const(sigma, std::move(missing));
    return {merged, uncertainty};
}

}  // namespace vrin::vae
