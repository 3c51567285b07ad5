#include "vrin/recurrent.hpp"

#include <array>

#include "vrin/errors.hpp"

namespace vrin::rnn {

namespace {

Tensor square_weight_zero_diag(std::size_t n, std::mt19937_64& rng) {
    Tensor w = init_weight(n, n, rng);
    for (std::size_t i = 0; i < n; ++i) w.at(i, i) = 0.0;
    return w;
}

// exp(-relu(pre)). The rectified value is capped well inside the double range
// so the factor never underflows to exactly 0.
constexpr double kMaxDecayExponent = 700.0;

ad::NodeId negative_exp_rectifier(ad::Graph& g, ad::NodeId pre) {
    return g.exp(g.neg(g.clamp(g.relu(pre), 0.0, kMaxDecayExponent)));
}

}  // namespace

void add_parameters(ParameterStore& store, const CellShape& shape, const std::string& prefix, std::mt19937_64& rng) {
    const std::size_t D = shape.features, H = shape.hidden;
    if (D == 0 || H == 0) throw ShapeError("recurrent cell: features and hidden must be positive");
    store.add(prefix + "w_u", init_weight(D, D, rng));
    store.add(prefix + "b_u", Tensor({D}, 0.0));
    store.add(prefix + "w_ups", square_weight_zero_diag(D, rng));
    store.add(prefix + "b_ups", Tensor({D}, 0.0));
    store.add(prefix + "w_gamma", init_weight(H, D, rng));
    store.add(prefix + "b_gamma", Tensor({H}, 0.0));
    store.add(prefix + "w_r", init_weight(D, H, rng));
    store.add(prefix + "b_r", Tensor({D}, 0.0));
    store.add(prefix + "w_tau", square_weight_zero_diag(D, rng));
    store.add(prefix + "b_tau", Tensor({D}, 0.0));
    // 1x1 convolution over the two estimate channels.
    Tensor comb = init_weight(1, 2, rng);
    store.add(prefix + "comb_a", Tensor::scalar(comb[0]));
    store.add(prefix + "comb_b", Tensor::scalar(comb[1]));
    store.add(prefix + "comb_bias", Tensor::scalar(0.0));
    store.add(prefix + "gru_wx", init_weight(3 * H, 2 * D, rng));
    store.add(prefix + "gru_wh", init_weight(2 * H, H, rng));
    store.add(prefix + "gru_wn", init_weight(H, H, rng));
    store.add(prefix + "gru_b", Tensor({3 * H}, 0.0));
    store.add(prefix + "w_y", init_weight(1, H, rng));
    store.add(prefix + "b_y", Tensor({1}, 0.0));
}

CellBinding bind(ad::Graph& g, const ParameterStore& store, const CellShape& shape, const std::string& prefix) {
    auto p = [&](const char* name) { return g.parameter(store, store.index(prefix + name)); };
    CellBinding c;
    c.shape = shape;
    c.w_u = p("w_u");
    c.b_u = p("b_u");
    c.w_ups = g.zero_diagonal(p("w_ups"));
    c.b_ups = p("b_ups");
    c.w_gamma = p("w_gamma");
    c.b_gamma = p("b_gamma");
    c.w_r = p("w_r");
    c.b_r = p("b_r");
    c.w_tau = g.zero_diagonal(p("w_tau"));
    c.b_tau = p("b_tau");
    c.comb_a = p("comb_a");
    c.comb_b = p("comb_b");
    c.comb_bias = p("comb_bias");
    c.gru_wx = p("gru_wx");
    c.gru_wh = p("gru_wh");
    c.gru_wn = p("gru_wn");
    c.gru_b = p("gru_b");
    c.w_y = p("w_y");
    c.b_y = p("b_y");
    return c;
}

UncertaintyGate uncertainty_gated_estimate(ad::Graph& g, const CellBinding& cell, ad::NodeId x_bar,
                                           ad::NodeId u_bar, bool gated) {
    auto linear = g.linear(x_bar, cell.w_ups, cell.b_ups);
    if (!gated) return {g.constant(Tensor(g.value(linear).shape(), 1.0)), linear};
    auto decay = negative_exp_rectifier(g, g.linear(u_bar, cell.w_u, cell.b_u));
    return {decay, g.mul(linear, decay)};
}

DecayedHistory temporal_decayed_history(ad::Graph& g, const CellBinding& cell, ad::NodeId h_prev,
                                        const Tensor& delta) {
    auto decay = negative_exp_rectifier(g, g.linear(g.constant(delta), cell.w_gamma, cell.b_gamma));
    return {decay, g.mul(h_prev, decay)};
}

HistoryEstimate history_feature_estimate(ad::Graph& g, const CellBinding& cell, ad::NodeId h_hat) {
    auto regression = g.linear(h_hat, cell.w_r, cell.b_r);
    return {regression, cross_feature_estimate(g, cell, regression)};
}

ad::NodeId cross_feature_estimate(ad::Graph& g, const CellBinding& cell, ad::NodeId x_r) {
    return g.linear(x_r, cell.w_tau, cell.b_tau);
}

Completion combine_and_complete(ad::Graph& g, const CellBinding& cell, ad::NodeId x_ups, ad::NodeId x_tau,
                                const Tensor& x_tilde, const Tensor& mask) {
    auto combined = g.add(g.add(g.mul(x_ups, cell.comb_a), g.mul(x_tau, cell.comb_b)), cell.comb_bias);
    Tensor observed(x_tilde.shape(), 0.0);
    Tensor missing(mask.shape(), 0.0);
    for (std::size_t i = 0; i < mask.size(); ++i) {
        observed[i] = mask[i] * x_tilde[i];
        missing[i] = 1.0 - mask[i];
    }
    auto completed = g.add(g.constant(std::move(observed)), g.mul_const(combined, std::move(missing)));
    return {combined, completed};
}

ad::NodeId gated_cell_step(ad::Graph& g, const CellBinding& cell, ad::NodeId completed, const Tensor& mask,
                           ad::NodeId h_hat) {
    const std::size_t H = cell.shape.hidden;
    const std::array<ad::NodeId, 2> parts{completed, g.constant(mask)};
    auto input = g.concat_cols(parts);
    auto from_input = g.linear(input, cell.gru_wx, cell.gru_b);  // [B, 3H]
    auto from_hidden = g.linear(h_hat, cell.gru_wh);             // [B, 2H]
    auto update = g.sigmoid(g.add(g.slice_cols(from_input, 0, H), g.slice_cols(from_hidden, 0, H)));
    auto reset = g.sigmoid(g.add(g.slice_cols(from_input, H, H), g.slice_cols(from_hidden, H, H)));
    auto candidate =
        g.tanh(g.add(g.slice_cols(from_input, 2 * H, H), g.linear(g.mul(reset, h_hat), cell.gru_wn)));
    // h = (1 - z) * h_hat + z * n
    auto keep = g.add_scalar(g.neg(update), 1.0);
    return g.add(g.mul(keep, h_hat), g.mul(update, candidate));
}

Prediction predict_outcome(ad::Graph& g, const CellBinding& cell, ad::NodeId h_last) {
    auto logit = g.linear(h_last, cell.w_y, cell.b_y);
    return {logit, g.sigmoid(logit)};
}

Unrolled unroll(ad::Graph& g, const CellBinding& cell, const SequenceInputs& in, bool gated) {
    const std::size_t T = in.steps();
    if (T == 0) throw ShapeError("unroll: empty sequence");
    if (in.mask.size() != T || in.delta.size() != T || in.x_bar.size() != T || in.u_bar.size() != T) {
        throw ShapeError("unroll: per-step inputs disagree on sequence length");
    }
    const std::size_t B = in.x_tilde[0].rows();
    Unrolled out;
    auto& tr = out.trace;
    auto h = g.constant(Tensor({B, cell.shape.hidden}, 0.0));
    for (std::size_t t = 0; t < T; ++t) {
        auto gate = uncertainty_gated_estimate(g, cell, in.x_bar[t], in.u_bar[t], gated);
        auto history = temporal_decayed_history(g, cell, h, in.delta[t]);
        auto est = history_feature_estimate(g, cell, history.hidden);
        auto done = combine_and_complete(g, cell, gate.estimate, est.temporal, in.x_tilde[t], in.mask[t]);
        h = gated_cell_step(g, cell, done.completed, in.mask[t], history.hidden);

        tr.upsilon.push_back(gate.decay);
        tr.x_ups.push_back(gate.estimate);
        tr.gamma.push_back(history.decay);
        tr.h_hat.push_back(history.hidden);
        tr.x_r.push_back(est.regression);
        tr.x_tau.push_back(est.temporal);
        tr.combined.push_back(done.combined);
        tr.completed.push_back(done.completed);
        tr.hidden.push_back(h);
    }
    out.prediction = predict_outcome(g, cell, h);
    return out;
}

BidirectionalUnrolled bidirectional_unroll(ad::Graph& g, const CellBinding& forward_cell,
                                           const CellBinding& backward_cell, const SequenceInputs& forward,
                                           const SequenceInputs& reversed, bool gated) {
    if (forward.steps() != reversed.steps()) throw ShapeError("bidirectional_unroll: direction lengths differ");
    BidirectionalUnrolled out;
    out.forward = unroll(g, forward_cell, forward, gated);
    out.backward = unroll(g, backward_cell, reversed, gated);
    const std::size_t T = forward.steps();
    for (std::size_t t = 0; t < T; ++t) {
        out.backward_completed.push_back(out.backward.trace.completed[T - 1 - t]);
        out.backward_combined.push_back(out.backward.trace.combined[T - 1 - t]);
    }
    auto logit = g.scale(g.add(out.forward.prediction.logit, out.backward.prediction.logit), 0.5);
    out.prediction = {logit, g.sigmoid(logit)};
    return out;
}

}  // namespace vrin::rnn
