#pragma once

// Tape-based reverse-mode differentiation over dense double tensors.
//
// A Graph is an append-only list of nodes. Every op appends one node whose
// inputs all have smaller ids, so reverse id order is a valid topological
// order for backward. Graphs are single-threaded objects; build a new one
// per forward pass.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "vrin/parameters.hpp"
#include "vrin/tensor.hpp"

namespace vrin::ad {

struct NodeId {
    std::uint32_t index = 0;
    bool operator==(const NodeId&) const = default;
};

enum class OpKind : std::uint8_t {
    Constant,
    Input,
    Parameter,
    MatMul,
    Linear,
    Add,
    Sub,
    Mul,
    MulConst,
    AddScalar,
    Scale,
    Neg,
    Tanh,
    Sigmoid,
    Exp,
    Log,
    Relu,
    Abs,
    Square,
    Clamp,
    ConcatCols,
    ConcatRows,
    SliceCols,
    SliceRows,
    Sum,
    Mean,
    BceWithLogits,
};

std::string_view op_name(OpKind op);

class Graph {
public:
    Graph() = default;
    Graph(const Graph&) = delete;
    Graph& operator=(const Graph&) = delete;
    Graph(Graph&&) = default;
    Graph& operator=(Graph&&) = default;

    // Leaves. Constants never receive gradient; inputs and parameters do.
    NodeId constant(Tensor value);
    NodeId input(Tensor value);
    NodeId parameter(const ParameterStore& store, std::size_t index);

    // a[m,k] x b[k,n]
    NodeId matmul(NodeId a, NodeId b);
    // x[B,in] * w[out,in]^T + bias[out], the row-batched form of W x + b.
    NodeId linear(NodeId x, NodeId w, NodeId bias);
    NodeId linear(NodeId x, NodeId w);

    // Elementwise; shapes must match exactly or one side must hold a single
    // value, which is broadcast.
    NodeId add(NodeId a, NodeId b);
    NodeId sub(NodeId a, NodeId b);
    NodeId mul(NodeId a, NodeId b);
    // Multiply by a fixed tensor of the same shape (masks, dropout).
    NodeId mul_const(NodeId a, Tensor factor);
    NodeId add_scalar(NodeId a, double c);
    NodeId scale(NodeId a, double c);
    NodeId neg(NodeId a);

    NodeId tanh(NodeId a);
    NodeId sigmoid(NodeId a);
    NodeId exp(NodeId a);
    NodeId log(NodeId a);
    NodeId relu(NodeId a);
    NodeId abs(NodeId a);
    NodeId square(NodeId a);
    // Gradient passes where lo <= a <= hi, zero outside.
    NodeId clamp(NodeId a, double lo, double hi);

    NodeId concat_cols(std::span<const NodeId> parts);
    NodeId concat_rows(std::span<const NodeId> parts);
    NodeId slice_cols(NodeId a, std::size_t begin, std::size_t count);
    NodeId slice_rows(NodeId a, std::size_t begin, std::size_t count);

    NodeId sum(NodeId a);
    NodeId mean(NodeId a);

    // Inverted dropout: zeroes each entry with probability `rate` and scales
    // survivors by 1/(1-rate). rate == 0 returns `a` unchanged.
    NodeId dropout(NodeId a, double rate, std::mt19937_64& rng);
    // Multiplies a square matrix by (1 - I).
    NodeId zero_diagonal(NodeId a);

    // Mean binary cross-entropy computed from logits, stable for any finite
    // logit. `labels` has one entry per logit.
    NodeId bce_with_logits(NodeId logits, const Tensor& labels);

    const Tensor& value(NodeId id) const { return nodes_[id.index].value; }
    OpKind kind(NodeId id) const { return nodes_[id.index].op; }
    std::size_t size() const { return nodes_.size(); }

    // Reverse sweep from a scalar node. Fills gradient slots for every node
    // that depends on an input or parameter.
    void backward(NodeId loss);
    // Gradient of the last backward() loss w.r.t. `id`; zeros if unreachable.
    Tensor grad(NodeId id) const;
    // Adds parameter-node gradients into the store's gradient slots.
    void accumulate_parameter_grads(ParameterStore& store) const;

private:
    struct Node {
        OpKind op = OpKind::Constant;
        std::vector<std::uint32_t> inputs;
        Tensor value;
        Tensor aux;  // op-specific cache: masks, factors
        double p0 = 0.0;
        double p1 = 0.0;
        bool requires_grad = false;
        std::ptrdiff_t param = -1;
    };

    NodeId push(OpKind op, std::vector<std::uint32_t> inputs, Tensor value, Tensor aux = {}, double p0 = 0.0,
                double p1 = 0.0);
    NodeId unary(OpKind op, NodeId a, Tensor value, Tensor aux = {}, double p0 = 0.0, double p1 = 0.0);
    NodeId binary(OpKind op, NodeId a, NodeId b);
    const Node& node(NodeId id) const { return nodes_[id.index]; }
    void check_id(NodeId id) const;

    void backprop_node(std::size_t i);
    Tensor& grad_slot(std::uint32_t i);

    std::vector<Node> nodes_;
    std::vector<Tensor> grads_;
};

}  // namespace vrin::ad
