#include "vrin/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vrin/errors.hpp"
#include "vrin/kernels.hpp"

namespace vrin::ad {

namespace {

inline double broadcast_at(const Tensor& t, std::size_t i) { return t.size() == 1 ? t[0] : t[i]; }

void require_rank2(const Tensor& t, std::string_view op, std::string_view what) {
    if (t.rank() != 2) {
        throw ShapeError(std::string(op) + ": " + std::string(what) + " must be a matrix, got " +
                         shape_string(t.shape()));
    }
}

}  // namespace

std::string_view op_name(OpKind op) {
    switch (op) {
        case OpKind::Constant: return "constant";
        case OpKind::Input: return "input";
        case OpKind::Parameter: return "parameter";
        case OpKind::MatMul: return "matmul";
        case OpKind::Linear: return "linear";
        case OpKind::Add: return "add";
        case OpKind::Sub: return "sub";
        case OpKind::Mul: return "mul";
        case OpKind::MulConst: return "mul_const";
        case OpKind::AddScalar: return "add_scalar";
        case OpKind::Scale: return "scale";
        case OpKind::Neg: return "neg";
        case OpKind::Tanh: return "tanh";
        case OpKind::Sigmoid: return "sigmoid";
        case OpKind::Exp: return "exp";
        case OpKind::Log: return "log";
        case OpKind::Relu: return "relu";
        case OpKind::Abs: return "abs";
        case OpKind::Square: return "square";
        case OpKind::Clamp: return "clamp";
        case OpKind::ConcatCols: return "concat_cols";
        case OpKind::ConcatRows: return "concat_rows";
        case OpKind::SliceCols: return "slice_cols";
        case OpKind::SliceRows: return "slice_rows";
        case OpKind::Sum: return "sum";
        case OpKind::Mean: return "mean";
        case OpKind::BceWithLogits: return "bce_with_logits";
    }
    return "unknown";
}

void Graph::check_id(NodeId id) const {
    if (id.index >= nodes_.size()) throw std::out_of_range("node id out of range");
}

NodeId Graph::push(OpKind op, std::vector<std::uint32_t> inputs, Tensor value, Tensor aux, double p0, double p1) {
    if (op != OpKind::Constant && op != OpKind::Input && op != OpKind::Parameter && !value.all_finite()) {
        throw NumericError("numeric overflow: non-finite output from " + std::string(op_name(op)) + " " +
                           shape_string(value.shape()));
    }
    Node n;
    n.op = op;
    n.requires_grad = false;
    for (auto in : inputs) n.requires_grad = n.requires_grad || nodes_[in].requires_grad;
    n.inputs = std::move(inputs);
    n.value = std::move(value);
    n.aux = std::move(aux);
    n.p0 = p0;
    n.p1 = p1;
    nodes_.push_back(std::move(n));
    return NodeId{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

NodeId Graph::constant(Tensor value) { return push(OpKind::Constant, {}, std::move(value)); }

NodeId Graph::input(Tensor value) {
    auto id = push(OpKind::Input, {}, std::move(value));
    nodes_.back().requires_grad = true;
    return id;
}

NodeId Graph::parameter(const ParameterStore& store, std::size_t index) {
    auto id = push(OpKind::Parameter, {}, store.value(index));
    nodes_.back().requires_grad = true;
    nodes_.back().param = static_cast<std::ptrdiff_t>(index);
    return id;
}

NodeId Graph::unary(OpKind op, NodeId a, Tensor value, Tensor aux, double p0, double p1) {
    return push(op, {a.index}, std::move(value), std::move(aux), p0, p1);
}

NodeId Graph::matmul(NodeId a, NodeId b) {
    check_id(a);
    check_id(b);
    const Tensor& av = value(a);
    const Tensor& bv = value(b);
    require_rank2(av, "matmul", "lhs");
    require_rank2(bv, "matmul", "rhs");
    if (av.cols() != bv.rows()) {
        throw ShapeError("matmul: inner dimensions differ, lhs " + shape_string(av.shape()) + " vs rhs " +
                         shape_string(bv.shape()));
    }
    const std::size_t m = av.rows(), k = av.cols(), n = bv.cols();
    Tensor out({m, n}, 0.0);
    kernels::matmul_nn(av.values(), bv.values(), out.values(), m, k, n);
    return push(OpKind::MatMul, {a.index, b.index}, std::move(out));
}

NodeId Graph::linear(NodeId x, NodeId w, NodeId bias) {
    check_id(bias);
    const Tensor& bv = value(bias);
    const Tensor& wv = value(w);
    if (wv.rank() == 2 && bv.size() != wv.rows()) {
        throw ShapeError("linear: bias " + shape_string(bv.shape()) + " does not match weight " +
                         shape_string(wv.shape()));
    }
    NodeId out = linear(x, w);
    // push() may have reallocated the node list; re-read the bias.
    const Tensor& b = nodes_[bias.index].value;
    Node& n = nodes_[out.index];
    const std::size_t rows = n.value.rows(), cols = n.value.cols();
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) n.value.at(r, c) += b[c];
    }
    if (!n.value.all_finite()) throw NumericError("numeric overflow: non-finite output from linear");
    n.inputs.push_back(bias.index);
    n.requires_grad = n.requires_grad || nodes_[bias.index].requires_grad;
    return out;
}

NodeId Graph::linear(NodeId x, NodeId w) {
    check_id(x);
    check_id(w);
    const Tensor& xv = value(x);
    const Tensor& wv = value(w);
    require_rank2(xv, "linear", "input");
    require_rank2(wv, "linear", "weight");
    if (xv.cols() != wv.cols()) {
        throw ShapeError("linear: input " + shape_string(xv.shape()) + " does not match weight " +
                         shape_string(wv.shape()));
    }
    const std::size_t batch = xv.rows(), in = xv.cols(), out = wv.rows();
    Tensor y({batch, out}, 0.0);
    kernels::matmul_nt(xv.values(), wv.values(), y.values(), batch, in, out);
    return push(OpKind::Linear, {x.index, w.index}, std::move(y));
}

NodeId Graph::binary(OpKind op, NodeId a, NodeId b) {
    check_id(a);
    check_id(b);
    const Tensor& av = value(a);
    const Tensor& bv = value(b);
    const bool same = av.shape() == bv.shape();
    if (!same && av.size() != 1 && bv.size() != 1) {
        throw ShapeError(std::string(op_name(op)) + ": shape mismatch " + shape_string(av.shape()) + " vs " +
                         shape_string(bv.shape()));
    }
    const Tensor& big = (same || bv.size() == 1) ? av : bv;
    Tensor out(big.shape(), 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double x = broadcast_at(av, i), y = broadcast_at(bv, i);
        switch (op) {
            case OpKind::Add: out[i] = x + y; break;
            case OpKind::Sub: out[i] = x - y; break;
            case OpKind::Mul: out[i] = x * y; break;
            default: throw std::logic_error("binary: unsupported op");
        }
    }
    return push(op, {a.index, b.index}, std::move(out));
}

NodeId Graph::add(NodeId a, NodeId b) { return binary(OpKind::Add, a, b); }
NodeId Graph::sub(NodeId a, NodeId b) { return binary(OpKind::Sub, a, b); }
NodeId Graph::mul(NodeId a, NodeId b) { return binary(OpKind::Mul, a, b); }

NodeId Graph::mul_const(NodeId a, Tensor factor) {
    check_id(a);
    const Tensor& av = value(a);
    if (av.shape() != factor.shape()) {
        throw ShapeError("mul_const: shape mismatch " + shape_string(av.shape()) + " vs " +
                         shape_string(factor.shape()));
    }
    Tensor out(av.shape(), 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * factor[i];
    return unary(OpKind::MulConst, a, std::move(out), std::move(factor));
}

NodeId Graph::add_scalar(NodeId a, double c) {
    check_id(a);
    Tensor out = value(a);
    for (auto& v : out.values()) v += c;
    return unary(OpKind::AddScalar, a, std::move(out), {}, c);
}

NodeId Graph::scale(NodeId a, double c) {
    check_id(a);
    Tensor out = value(a);
    for (auto& v : out.values()) v *= c;
    return unary(OpKind::Scale, a, std::move(out), {}, c);
}

NodeId Graph::neg(NodeId a) {
    check_id(a);
    Tensor out = value(a);
    for (auto& v : out.values()) v = -v;
    return unary(OpKind::Neg, a, std::move(out));
}

NodeId Graph::tanh(NodeId a) {
    check_id(a);
    Tensor out(value(a).shape(), 0.0);
    kernels::tanh(value(a).values(), out.values());
    return unary(OpKind::Tanh, a, std::move(out));
}

NodeId Graph::sigmoid(NodeId a) {
    check_id(a);
    Tensor out(value(a).shape(), 0.0);
    kernels::sigmoid(value(a).values(), out.values());
    return unary(OpKind::Sigmoid, a, std::move(out));
}

NodeId Graph::exp(NodeId a) {
    check_id(a);
    Tensor out(value(a).shape(), 0.0);
    kernels::exp(value(a).values(), out.values());
    return unary(OpKind::Exp, a, std::move(out));
}

NodeId Graph::log(NodeId a) {
    check_id(a);
    Tensor out = value(a);
    for (auto& v : out.values()) v = std::log(v);
    return unary(OpKind::Log, a, std::move(out));
}

NodeId Graph::relu(NodeId a) {
    check_id(a);
    Tensor out = value(a);
    for (auto& v : out.values()) v = std::max(0.0, v);
    return unary(OpKind::Relu, a, std::move(out));
}

NodeId Graph::abs(NodeId a) {
    check_id(a);
    Tensor out = value(a);
    for (auto& v : out.values()) v = std::fabs(v);
    return unary(OpKind::Abs, a, std::move(out));
}

NodeId Graph::square(NodeId a) {
    check_id(a);
    Tensor out = value(a);
    for (auto& v : out.values()) v = v * v;
    return unary(OpKind::Square, a, std::move(out));
}

NodeId Graph::clamp(NodeId a, double lo, double hi) {
    check_id(a);
    if (!(lo <= hi)) throw std::invalid_argument("clamp: lo must not exceed hi");
    Tensor out = value(a);
    for (auto& v : out.values()) v = std::clamp(v, lo, hi);
    return unary(OpKind::Clamp, a, std::move(out), {}, lo, hi);
}

NodeId Graph::concat_cols(std::span<const NodeId> parts) {
    if (parts.empty()) throw ShapeError("concat_cols: no inputs");
    std::size_t rows = 0, cols = 0;
    std::vector<std::uint32_t> ins;
    for (std::size_t p = 0; p < parts.size(); ++p) {
        check_id(parts[p]);
        const Tensor& v = value(parts[p]);
        require_rank2(v, "concat_cols", "part");
        if (p == 0) rows = v.rows();
        if (v.rows() != rows) {
            throw ShapeError("concat_cols: row counts differ, " + shape_string(value(parts[0]).shape()) + " vs " +
                             shape_string(v.shape()));
        }
        cols += v.cols();
        ins.push_back(parts[p].index);
    }
    Tensor out({rows, cols}, 0.0);
    std::size_t offset = 0;
    for (auto id : parts) {
        const Tensor& v = value(id);
        for (std::size_t r = 0; r < rows; ++r) {
            std::copy_n(v.values().begin() + r * v.cols(), v.cols(), out.values().begin() + r * cols + offset);
        }
        offset += v.cols();
    }
    return push(OpKind::ConcatCols, std::move(ins), std::move(out));
}

NodeId Graph::concat_rows(std::span<const NodeId> parts) {
    if (parts.empty()) throw ShapeError("concat_rows: no inputs");
    std::size_t rows = 0, cols = 0;
    std::vector<std::uint32_t> ins;
    for (std::size_t p = 0; p < parts.size(); ++p) {
        check_id(parts[p]);
        const Tensor& v = value(parts[p]);
        require_rank2(v, "concat_rows", "part");
        if (p == 0) cols = v.cols();
        if (v.cols() != cols) {
            throw ShapeError("concat_rows: column counts differ, " + shape_string(value(parts[0]).shape()) +
                             " vs " + shape_string(v.shape()));
        }
        rows += v.rows();
        ins.push_back(parts[p].index);
    }
    std::vector<double> data;
    data.reserve(rows * cols);
    for (auto id : parts) {
        const auto& s = value(id).storage();
        data.insert(data.end(), s.begin(), s.end());
    }
    return push(OpKind::ConcatRows, std::move(ins), Tensor({rows, cols}, std::move(data)));
}

NodeId Graph::slice_cols(NodeId a, std::size_t begin, std::size_t count) {
    check_id(a);
    const Tensor& v = value(a);
    require_rank2(v, "slice_cols", "input");
    if (count == 0 || begin + count > v.cols()) {
        throw ShapeError("slice_cols: range [" + std::to_string(begin) + ", " + std::to_string(begin + count) +
                         ") outside " + shape_string(v.shape()));
    }
    Tensor out({v.rows(), count}, 0.0);
    for (std::size_t r = 0; r < v.rows(); ++r) {
        std::copy_n(v.values().begin() + r * v.cols() + begin, count, out.values().begin() + r * count);
    }
    return unary(OpKind::SliceCols, a, std::move(out), {}, static_cast<double>(begin));
}

NodeId Graph::slice_rows(NodeId a, std::size_t begin, std::size_t count) {
    check_id(a);
    const Tensor& v = value(a);
    require_rank2(v, "slice_rows", "input");
    if (count == 0 || begin + count > v.rows()) {
        throw ShapeError("slice_rows: range [" + std::to_string(begin) + ", " + std::to_string(begin + count) +
                         ") outside " + shape_string(v.shape()));
    }
    const auto first = v.storage().begin() + static_cast<std::ptrdiff_t>(begin * v.cols());
    std::vector<double> data(first, first + static_cast<std::ptrdiff_t>(count * v.cols()));
    return unary(OpKind::SliceRows, a, Tensor({count, v.cols()}, std::move(data)), {}, static_cast<double>(begin));
}

NodeId Graph::sum(NodeId a) {
    check_id(a);
    double s = 0.0;
    for (double v : value(a).values()) s += v;
    return unary(OpKind::Sum, a, Tensor::scalar(s));
}

NodeId Graph::mean(NodeId a) {
    check_id(a);
    double s = 0.0;
    for (double v : value(a).values()) s += v;
    return unary(OpKind::Mean, a, Tensor::scalar(s / static_cast<double>(value(a).size())));
}

NodeId Graph::dropout(NodeId a, double rate, std::mt19937_64& rng) {
    if (rate < 0.0 || rate >= 1.0) throw std::invalid_argument("dropout rate must lie in [0, 1)");
    if (rate == 0.0) return a;
    check_id(a);
    std::bernoulli_distribution keep(1.0 - rate);
    const double scale = 1.0 / (1.0 - rate);
    Tensor mask(value(a).shape(), 0.0);
    for (auto& m : mask.values()) m = keep(rng) ? scale : 0.0;
    return mul_const(a, std::move(mask));
}

NodeId Graph::zero_diagonal(NodeId a) {
    check_id(a);
    const Tensor& v = value(a);
    if (v.rank() != 2 || v.rows() != v.cols()) {
        throw ShapeError("zero_diagonal: needs a square matrix, got " + shape_string(v.shape()));
    }
    Tensor mask(v.shape(), 1.0);
    for (std::size_t i = 0; i < v.rows(); ++i) mask.at(i, i) = 0.0;
    return mul_const(a, std::move(mask));
}

NodeId Graph::bce_with_logits(NodeId logits, const Tensor& labels) {
    check_id(logits);
    const Tensor& l = value(logits);
    if (l.size() != labels.size()) {
        throw ShapeError("bce_with_logits: logits " + shape_string(l.shape()) + " vs labels " +
                         shape_string(labels.shape()));
    }
    double total = 0.0;
    for (std::size_t i = 0; i < l.size(); ++i) {
        const double x = l[i], y = labels[i];
        total += std::max(x, 0.0) - x * y + std::log1p(std::exp(-std::fabs(x)));
    }
    Tensor aux(l.shape(), labels.storage());
    return unary(OpKind::BceWithLogits, logits, Tensor::scalar(total / static_cast<double>(l.size())),
                 std::move(aux));
}

Tensor& Graph::grad_slot(std::uint32_t i) {
    if (grads_[i].empty()) grads_[i] = Tensor(nodes_[i].value.shape(), 0.0);
    return grads_[i];
}

void Graph::backward(NodeId loss) {
    check_id(loss);
    if (value(loss).size() != 1) {
        throw ShapeError("backward: loss must be a scalar, got " + shape_string(value(loss).shape()));
    }
    grads_.assign(nodes_.size(), Tensor{});
    grads_[loss.index] = Tensor(value(loss).shape(), 1.0);
    for (std::size_t i = loss.index + 1; i-- > 0;) {
        if (grads_[i].empty() || !nodes_[i].requires_grad) continue;
        backprop_node(i);
    }
}

void Graph::backprop_node(std::size_t i) {
    const Node& n = nodes_[i];
    const Tensor& g = grads_[i];
    auto wants = [&](std::size_t k) { return nodes_[n.inputs[k]].requires_grad; };
    auto in_value = [&](std::size_t k) -> const Tensor& { return nodes_[n.inputs[k]].value; };

    switch (n.op) {
        case OpKind::Constant:
        case OpKind::Input:
        case OpKind::Parameter: return;

        case OpKind::MatMul: {
            const Tensor& a = in_value(0);
            const Tensor& b = in_value(1);
            const std::size_t m = a.rows(), k = a.cols(), nn = b.cols();
            if (wants(0)) kernels::matmul_nt(g.values(), b.values(), grad_slot(n.inputs[0]).values(), m, nn, k);
            if (wants(1)) kernels::matmul_tn(a.values(), g.values(), grad_slot(n.inputs[1]).values(), k, m, nn);
            return;
        }
        case OpKind::Linear: {
            const Tensor& x = in_value(0);
            const Tensor& w = in_value(1);
            const std::size_t batch = x.rows(), in = x.cols(), out = w.rows();
            if (wants(0)) kernels::matmul_nn(g.values(), w.values(), grad_slot(n.inputs[0]).values(), batch, out, in);
            if (wants(1)) kernels::matmul_tn(g.values(), x.values(), grad_slot(n.inputs[1]).values(), out, batch, in);
            if (n.inputs.size() == 3 && wants(2)) {
                Tensor& gb = grad_slot(n.inputs[2]);
                for (std::size_t r = 0; r < batch; ++r) {
                    for (std::size_t c = 0; c < out; ++c) gb[c] += g.at(r, c);
                }
            }
            return;
        }
        case OpKind::Add:
        case OpKind::Sub:
        case OpKind::Mul: {
            const Tensor& a = in_value(0);
            const Tensor& b = in_value(1);
            for (std::size_t side = 0; side < 2; ++side) {
                if (!wants(side)) continue;
                Tensor& ga = grad_slot(n.inputs[side]);
                const bool reduce = ga.size() == 1 && g.size() != 1;
                const Tensor& other = side == 0 ? b : a;
                for (std::size_t j = 0; j < g.size(); ++j) {
                    double d = g[j];
                    if (n.op == OpKind::Sub && side == 1) d = -d;
                    if (n.op == OpKind::Mul) d *= broadcast_at(other, j);
                    ga[reduce ? 0 : j] += d;
                }
            }
            return;
        }
        default: break;
    }

    // Remaining ops have a single differentiable input.
    if (!wants(0)) {
        if (n.op != OpKind::ConcatCols && n.op != OpKind::ConcatRows) return;
    }

    switch (n.op) {
        case OpKind::MulConst: {
            Tensor& ga = grad_slot(n.inputs[0]);
            for (std::size_t j = 0; j < g.size(); ++j) ga[j] += g[j] * n.aux[j];
            return;
        }
        case OpKind::AddScalar: {
            Tensor& ga = grad_slot(n.inputs[0]);
            for (std::size_t j = 0; j < g.size(); ++j) ga[j] += g[j];
            return;
        }
        case OpKind::Scale: {
            Tensor& ga = grad_slot(n.inputs[0]);
            for (std::size_t j = 0; j < g.size(); ++j) ga[j] += g[j] * n.p0;
            return;
        }
        case OpKind::Neg: {
            Tensor& ga = grad_slot(n.inputs[0]);
            for (std::size_t j = 0; j < g.size(); ++j) ga[j] -= g[j];
            return;
        }
        case OpKind::Tanh: {
            Tensor& ga = grad_slot(n.inputs[0]);
            for (std::size_t j = 0; j < g.size(); ++j) ga[j] += g[j] * (1.0 - n.value[j] * n.value[j]);
            return;
        }
        case OpKind::Sigmoid: {
            Tensor& ga = grad_slot(n.inputs[0]);
            for (std::size_t j = 0; j < g.size(); ++j) ga[j] += g[j] * n.value[j] * (1.0 - n.value[j]);
            return;
        }
        case OpKind::Exp: {
            Tensor& ga = grad_slot(n.inputs[0]);
            for (std::size_t j = 0; j < g.size(); ++j) ga[j] += g[j] * n.value[j];
            return;
        }
        case OpKind::Log: {
            const Tensor& a = in_value(0);
            Tensor& ga = grad_slot(n.inputs[0]);
            for (std::size_t j = 0; j < g.size(); ++j) ga[j] += g[j] / a[j];
            return;
        }
        case OpKind::Relu: {
            const Tensor& a = in_value(0);
            Tensor& ga = grad_slot(n.inputs[0]);
            for (std::size_t j = 0; j < g.size(); ++j) {
                if (a[j] > 0.0) ga[j] += g[j];
            }
            return;
        }
        case OpKind::Abs: {
            const Tensor& a = in_value(0);
            Tensor& ga = grad_slot(n.inputs[0]);
            for (std::size_t j = 0; j < g.size(); ++j) {
                if (a[j] > 0.0) {
                    ga[j] += g[j];
                } else if (a[j] < 0.0) {
                    ga[j] -= g[j];
                }
            }
            return;
        }
        case OpKind::Square: {
            const Tensor& a = in_value(0);
            Tensor& ga = grad_slot(n.inputs[0]);
            for (std::size_t j = 0; j < g.size(); ++j) ga[j] += 2.0 * a[j] * g[j];
            return;
        }
        case OpKind::Clamp: {
            const Tensor& a = in_value(0);
            Tensor& ga = grad_slot(n.inputs[0]);
            for (std::size_t j = 0; j < g.size(); ++j) {
                if (a[j] >= n.p0 && a[j] <= n.p1) ga[j] += g[j];
            }
            return;
        }
        case OpKind::ConcatCols: {
            const std::size_t rows = n.value.rows(), cols = n.value.cols();
            std::size_t offset = 0;
            for (auto in : n.inputs) {
                const std::size_t c = nodes_[in].value.cols();
                if (nodes_[in].requires_grad) {
                    Tensor& ga = grad_slot(in);
                    for (std::size_t r = 0; r < rows; ++r) {
                        for (std::size_t j = 0; j < c; ++j) ga.at(r, j) += g[r * cols + offset + j];
                    }
                }
                offset += c;
            }
            return;
        }
        case OpKind::ConcatRows: {
            std::size_t offset = 0;
            for (auto in : n.inputs) {
                const std::size_t len = nodes_[in].value.size();
                if (nodes_[in].requires_grad) {
                    Tensor& ga = grad_slot(in);
                    for (std::size_t j = 0; j < len; ++j) ga[j] += g[offset + j];
                }
                offset += len;
            }
            return;
        }
        case OpKind::SliceCols: {
            Tensor& ga = grad_slot(n.inputs[0]);
            const auto begin = static_cast<std::size_t>(n.p0);
            const std::size_t rows = n.value.rows(), count = n.value.cols();
            for (std::size_t r = 0; r < rows; ++r) {
                for (std::size_t j = 0; j < count; ++j) ga.at(r, begin + j) += g.at(r, j);
            }
            return;
        }
        case OpKind::SliceRows: {
            Tensor& ga = grad_slot(n.inputs[0]);
            const std::size_t offset = static_cast<std::size_t>(n.p0) * ga.cols();
            for (std::size_t j = 0; j < g.size(); ++j) ga[offset + j] += g[j];
            return;
        }
        case OpKind::Sum: {
            Tensor& ga = grad_slot(n.inputs[0]);
            for (auto& v : ga.values()) v += g[0];
            return;
        }
        case OpKind::Mean: {
            Tensor& ga = grad_slot(n.inputs[0]);
            const double d = g[0] / static_cast<double>(ga.size());
            for (auto& v : ga.values()) v += d;
            return;
        }
        case OpKind::BceWithLogits: {
            const Tensor& l = in_value(0);
            Tensor& ga = grad_slot(n.inputs[0]);
            const double inv = g[0] / static_cast<double>(l.size());
            for (std::size_t j = 0; j < l.size(); ++j) {
                const double x = l[j];
                const double p = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
                ga[j] += (p - n.aux[j]) * inv;
            }
            return;
        }
        default: throw std::logic_error("backward: unhandled op " + std::string(op_name(n.op)));
    }
}

Tensor Graph::grad(NodeId id) const {
    check_id(id);
    if (id.index < grads_.size() && !grads_[id.index].empty()) return grads_[id.index];
    return Tensor(value(id).shape(), 0.0);
}

void Graph::accumulate_parameter_grads(ParameterStore& store) const {
    for (std::size_t i = 0; i < nodes_.size() && i < grads_.size(); ++i) {
        const Node& n = nodes_[i];
        if (n.param < 0 || grads_[i].empty()) continue;
        Tensor& dst = store.grad(static_cast<std::size_t>(n.param));
        if (dst.shape() != grads_[i].shape()) {
            throw ShapeError("parameter '" + store.name(static_cast<std::size_t>(n.param)) +
                             "' changed shape since it was bound");
        }
        for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += grads_[i][j];
    }
}

}  // namespace vrin::ad
