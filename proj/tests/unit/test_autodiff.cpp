#include <doctest.h>

#include <cmath>
#include <random>

#include "vrin/errors.hpp"
#include "vrin/graph.hpp"
#include "vrin/optim.hpp"

using namespace vrin;
using ad::Graph;
using ad::NodeId;

namespace {

Tensor random_tensor(Shape shape, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    Tensor t(shape, 0.0);
    for (auto& v : t.values()) v = u(rng);
    return t;
}

// Reduces any node to a scalar with non-uniform weights so each output
// element contributes a distinct gradient.
NodeId weighted_sum(Graph& g, NodeId y) {
    const Tensor& v = g.value(y);
    Tensor w(v.shape(), 0.0);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = 0.3 + 0.1 * static_cast<double>(i % 7);
    return g.sum(g.mul_const(y, w));
}

double check(const LossBuilder& build, ParameterStore& store) { return grad_check(build, store).max_relative_error; }

}  // namespace

TEST_CASE("elementwise ops match central differences") {
    ParameterStore store;
    store.add("a", random_tensor({3, 4}, 1));
    store.add("b", random_tensor({3, 4}, 2));
    store.add("p", random_tensor({3, 4}, 3, 0.5, 2.0));  // strictly positive for log

    using Op = std::function<NodeId(Graph&, NodeId, NodeId, NodeId)>;
    const std::pair<const char*, Op> ops[] = {
        {"add", [](Graph& g, NodeId a, NodeId b, NodeId) { return g.add(a, b); }},
        {"sub", [](Graph& g, NodeId a, NodeId b, NodeId) { return g.sub(a, b); }},
        {"mul", [](Graph& g, NodeId a, NodeId b, NodeId) { return g.mul(a, b); }},
        {"tanh", [](Graph& g, NodeId a, NodeId, NodeId) { return g.tanh(a); }},
        {"sigmoid", [](Graph& g, NodeId a, NodeId, NodeId) { return g.sigmoid(a); }},
        {"exp", [](Graph& g, NodeId a, NodeId, NodeId) { return g.exp(a); }},
        {"log", [](Graph& g, NodeId, NodeId, NodeId p) { return g.log(p); }},
        {"square", [](Graph& g, NodeId a, NodeId, NodeId) { return g.square(a); }},
        {"scale", [](Graph& g, NodeId a, NodeId, NodeId) { return g.scale(a, -2.5); }},
        {"neg", [](Graph& g, NodeId a, NodeId, NodeId) { return g.neg(a); }},
        {"add_scalar", [](Graph& g, NodeId a, NodeId, NodeId) { return g.add_scalar(a, 0.7); }},
        {"relu", [](Graph& g, NodeId a, NodeId, NodeId) { return g.relu(a); }},
        {"abs", [](Graph& g, NodeId a, NodeId, NodeId) { return g.abs(a); }},
    };
    for (const auto& [name, op] : ops) {
        CAPTURE(name);
        const double err = check(
            [&](Graph& g, const ParameterStore& s) {
                return weighted_sum(g, op(g, g.parameter(s, 0), g.parameter(s, 1), g.parameter(s, 2)));
            },
            store);
        CHECK(err < 1e-7);
    }
}

TEST_CASE("matrix and structural ops match central differences") {
    ParameterStore store;
    store.add("x", random_tensor({3, 4}, 4));
    store.add("w", random_tensor({5, 4}, 5));
    store.add("b", random_tensor({5}, 6));
    store.add("m", random_tensor({4, 2}, 7));

    using Op = std::function<NodeId(Graph&, const ParameterStore&)>;
    const std::pair<const char*, Op> ops[] = {
        {"matmul", [](Graph& g, const ParameterStore& s) { return g.matmul(g.parameter(s, 0), g.parameter(s, 3)); }},
        {"linear", [](Graph& g, const ParameterStore& s) {
             return g.linear(g.parameter(s, 0), g.parameter(s, 1), g.parameter(s, 2));
         }},
        {"concat_cols", [](Graph& g, const ParameterStore& s) {
             const NodeId parts[] = {g.parameter(s, 0), g.tanh(g.parameter(s, 0))};
             return g.concat_cols(parts);
         }},
        {"concat_rows", [](Graph& g, const ParameterStore& s) {
             const NodeId parts[] = {g.parameter(s, 0), g.parameter(s, 1)};
             return g.concat_rows(parts);
         }},
        {"slice_cols", [](Graph& g, const ParameterStore& s) { return g.slice_cols(g.parameter(s, 1), 1, 2); }},
        {"slice_rows", [](Graph& g, const ParameterStore& s) { return g.slice_rows(g.parameter(s, 1), 2, 3); }},
        {"zero_diagonal", [](Graph& g, const ParameterStore& s) {
             return g.zero_diagonal(g.matmul(g.parameter(s, 3), g.slice_rows(g.parameter(s, 0), 0, 2)));
         }},
        {"broadcast", [](Graph& g, const ParameterStore& s) {
             return g.mul(g.parameter(s, 0), g.slice_cols(g.slice_rows(g.parameter(s, 1), 0, 1), 0, 1));
         }},
        {"mean", [](Graph& g, const ParameterStore& s) { return g.mean(g.square(g.parameter(s, 1))); }},
        {"clamp", [](Graph& g, const ParameterStore& s) { return g.clamp(g.parameter(s, 1), -0.5, 0.5); }},
    };
    for (const auto& [name, op] : ops) {
        CAPTURE(name);
        const double err = check([&](Graph& g, const ParameterStore& s) { return weighted_sum(g, op(g, s)); }, store);
        CHECK(err < 1e-7);
    }
}

TEST_CASE("bce with logits matches central differences and a direct formula") {
    ParameterStore store;
    store.add("z", random_tensor({6, 1}, 8, -3.0, 3.0));
    const Tensor labels = Tensor::column({1, 0, 0, 1, 1, 0});
    CHECK(check([&](Graph& g, const ParameterStore& s) { return g.bce_with_logits(g.parameter(s, 0), labels); },
                store) < 1e-7);

    Graph g;
    const NodeId z = g.parameter(store, 0);
    const double got = g.value(g.bce_with_logits(z, labels)).item();
    double expected = 0.0;
    for (std::size_t i = 0; i < 6; ++i) {
        const double p = 1.0 / (1.0 + std::exp(-store.value(0)[i]));
        expected -= labels[i] * std::log(p) + (1 - labels[i]) * std::log(1 - p);
    }
    CHECK(got == doctest::Approx(expected / 6).epsilon(1e-12));
}

TEST_CASE("bce with logits stays finite for extreme logits") {
    Graph g;
    const NodeId z = g.input(Tensor::column({800.0, -800.0}));
    const double loss = g.value(g.bce_with_logits(z, Tensor::column({0.0, 1.0}))).item();
    CHECK(loss == doctest::Approx(800.0));
}

TEST_CASE("abs uses zero subgradient at zero and clamp blocks gradient outside its range") {
    Graph g;
    const NodeId x = g.input(Tensor::row({0.0, -2.0, 2.0, 0.5}));
    const NodeId loss = g.add(g.sum(g.abs(x)), g.sum(g.clamp(x, -1.0, 1.0)));
    g.backward(loss);
    const Tensor grad = g.grad(x);
    CHECK(grad[0] == 1.0);   // abs: 0, clamp: 1
    CHECK(grad[1] == -1.0);  // abs: -1, clamp: 0
    CHECK(grad[2] == 1.0);   // abs: 1, clamp: 0
    CHECK(grad[3] == 2.0);
}

TEST_CASE("shape errors name both operands") {
    Graph g;
    const NodeId a = g.input(Tensor({2, 3}, 1.0));
    const NodeId b = g.input(Tensor({3, 2}, 1.0));
    try {
        g.add(a, b);
        FAIL("expected ShapeError");
    } catch (const ShapeError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("[2x3]") != std::string::npos);
        CHECK(msg.find("[3x2]") != std::string::npos);
    }
    CHECK_THROWS_AS(g.matmul(a, a), ShapeError);
    CHECK_THROWS_AS(g.backward(a), ShapeError);
}

TEST_CASE("non-finite forward values raise numeric errors") {
    Graph g;
    const NodeId x = g.input(Tensor::scalar(1000.0));
    CHECK_THROWS_AS(g.exp(x), NumericError);
}

TEST_CASE("dropout with rate zero is the identity and otherwise rescales survivors") {
    std::mt19937_64 rng(3);
    Graph g;
    const NodeId x = g.input(Tensor({4, 50}, 1.0));
    CHECK(g.dropout(x, 0.0, rng) == x);
    const Tensor& y = g.value(g.dropout(x, 0.5, rng));
    for (double v : y.values()) CHECK((v == 0.0 || v == 2.0));
}

TEST_CASE("unreachable nodes receive zero gradient") {
    Graph g;
    const NodeId a = g.input(Tensor::row({1.0, 2.0}));
    const NodeId b = g.input(Tensor::row({3.0, 4.0}));
    g.backward(g.sum(a));
    const Tensor gb = g.grad(b);
    CHECK(gb[0] == 0.0);
    CHECK(gb[1] == 0.0);
}

TEST_CASE("adam first step moves each parameter by the learning rate against its gradient sign") {
    ParameterStore store;
    store.add("w", Tensor::row({1.0, -1.0, 0.5}));
    Adam adam(store, AdamOptions{0.1, 0.9, 0.999, 1e-8, 0.0});
    store.grad(0) = Tensor::row({2.0, -0.5, 0.0});
    adam.step(store);
    // Bias-corrected first step: m_hat = g, v_hat = g^2, update = lr * g / (|g| + eps).
    CHECK(store.value(0)[0] == doctest::Approx(1.0 - 0.1 * 2.0 / (2.0 + 1e-8)).epsilon(1e-15));
    CHECK(store.value(0)[1] == doctest::Approx(-1.0 + 0.1 * 0.5 / (0.5 + 1e-8)).epsilon(1e-15));
    CHECK(store.value(0)[2] == 0.5);
    CHECK(adam.steps() == 1);
}

TEST_CASE("adam minimizes a quadratic") {
    ParameterStore store;
    store.add("w", Tensor::row({3.0, -2.0}));
    Adam adam(store, AdamOptions{0.05});
    for (int i = 0; i < 2000; ++i) {
        Graph g;
        const NodeId loss = g.sum(g.square(g.add_scalar(g.parameter(store, 0), -1.0)));
        g.backward(loss);
        store.zero_grad();
        g.accumulate_parameter_grads(store);
        adam.step(store);
    }
    CHECK(store.value(0)[0] == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(store.value(0)[1] == doctest::Approx(1.0).epsilon(1e-3));
}
