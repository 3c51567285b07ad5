#pragma once

// Uncertainty-aware recurrent imputation cell and its unrolling.
//
// Per step, with x_bar / u_bar from the VAE:
//   upsilon = exp(-relu(W_u u_bar + b_u))           uncertainty decay
//   x_ups   = (W_ups x_bar + b_ups) * upsilon       feature estimate, diag(W_ups) = 0
//   gamma   = exp(-relu(W_gamma delta + b_gamma))   temporal decay
//   h_hat   = h_prev * gamma
//   x_r     = W_r h_hat + b_r
//   x_tau   = W_tau x_r + b_tau                     diag(W_tau) = 0
//   c       = a * x_ups + b * x_tau + c0            1x1 convolution
//   x_c     = m * x_tilde + (1 - m) * c
//   h       = GRU([x_c, m], h_hat)
// and y_hat = sigmoid(W_y h_T + b_y) after the last step.

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "vrin/graph.hpp"
#include "vrin/parameters.hpp"

namespace vrin::rnn {

struct CellShape {
    std::size_t features = 0;
    std::size_t hidden = 0;
};

// Registers one direction's parameters under `prefix` (e.g. "fwd.").
// Diagonals of W_ups and W_tau start at zero.
void add_parameters(ParameterStore& store, const CellShape& shape, const std::string& prefix, std::mt19937_64& rng);

struct CellBinding {
    CellShape shape;
    ad::NodeId w_u, b_u;
    ad::NodeId w_ups, b_ups;  // diagonal already masked
    ad::NodeId w_gamma, b_gamma;
    ad::NodeId w_r, b_r;
    ad::NodeId w_tau, b_tau;  // diagonal already masked
    ad::NodeId comb_a, comb_b, comb_bias;
    ad::NodeId gru_wx;  // [3H, 2D]: update, reset, candidate
    ad::NodeId gru_wh;  // [2H, H]: update, reset
    ad::NodeId gru_wn;  // [H, H]: candidate, applied to reset * h
    ad::NodeId gru_b;   // [3H]
    ad::NodeId w_y, b_y;
};

CellBinding bind(ad::Graph& graph, const ParameterStore& store, const CellShape& shape, const std::string& prefix);

struct UncertaintyGate {
    ad::NodeId decay;     // upsilon
    ad::NodeId estimate;  // x_ups
};

// With `gated == false` the decay is omitted and x_ups = W_ups x_bar + b_ups.
UncertaintyGate uncertainty_gated_estimate(ad::Graph& g, const CellBinding& cell, ad::NodeId x_bar,
                                           ad::NodeId u_bar, bool gated = true);

struct DecayedHistory {
    ad::NodeId decay;   // gamma
    ad::NodeId hidden;  // h_hat
};

DecayedHistory temporal_decayed_history(ad::Graph& g, const CellBinding& cell, ad::NodeId h_prev,
                                        const Tensor& delta);

struct HistoryEstimate {
    ad::NodeId regression;  // x_r
    ad::NodeId temporal;    // x_tau
};

HistoryEstimate history_feature_estimate(ad::Graph& g, const CellBinding& cell, ad::NodeId h_hat);

// x_tau = W_tau x_r + b_tau alone (the second half of the above).
ad::NodeId cross_feature_estimate(ad::Graph& g, const CellBinding& cell, ad::NodeId x_r);

struct Completion {
    ad::NodeId combined;   // c
    ad::NodeId completed;  // x_c
};

Completion combine_and_complete(ad::Graph& g, const CellBinding& cell, ad::NodeId x_ups, ad::NodeId x_tau,
                                const Tensor& x_tilde, const Tensor& mask);

ad::NodeId gated_cell_step(ad::Graph& g, const CellBinding& cell, ad::NodeId completed, const Tensor& mask,
                           ad::NodeId h_hat);

struct Prediction {
    ad::NodeId logit;
    ad::NodeId probability;
};

Prediction predict_outcome(ad::Graph& g, const CellBinding& cell, ad::NodeId h_last);

// One direction's inputs, each step a [B, D] block.
struct SequenceInputs {
    std::vector<Tensor> x_tilde;
    std::vector<Tensor> mask;
    std::vector<Tensor> delta;
    std::vector<ad::NodeId> x_bar;
    std::vector<ad::NodeId> u_bar;
    std::size_t steps() const { return x_tilde.size(); }
};

struct StepTrace {
    std::vector<ad::NodeId> upsilon, x_ups, gamma, h_hat, x_r, x_tau, combined, completed, hidden;
};

struct Unrolled {
    StepTrace trace;
    Prediction prediction;
};

// Runs the cell over every step from h_0 = 0.
Unrolled unroll(ad::Graph& g, const CellBinding& cell, const SequenceInputs& inputs, bool gated = true);

struct BidirectionalUnrolled {
    Unrolled forward;
    Unrolled backward;           // indexed in reversed time
    std::vector<ad::NodeId> backward_completed;  // backward x_c re-indexed to original time
    std::vector<ad::NodeId> backward_combined;   // backward c re-indexed to original time
    Prediction prediction;       // sigmoid of the mean of both logits
};

// `reversed` holds the time-reversed sequence with its own time gaps.
BidirectionalUnrolled bidirectional_unroll(ad::Graph& g, const CellBinding& forward_cell,
                                           const CellBinding& backward_cell, const SequenceInputs& forward,
                                           const SequenceInputs& reversed, bool gated = true);

}  // namespace vrin::rnn
