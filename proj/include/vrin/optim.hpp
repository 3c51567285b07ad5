#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "vrin/graph.hpp"
#include "vrin/parameters.hpp"

namespace vrin {

struct AdamOptions {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    // L2 coefficient added to the gradient (coupled, not decoupled).
    double weight_decay = 0.0;
};

class Adam {
public:
    Adam(const ParameterStore& store, AdamOptions options);

    // One bias-corrected update from the gradients held in `store`.
    void step(ParameterStore& store);

    std::uint64_t steps() const { return t_; }
    const AdamOptions& options() const { return options_; }

private:
    AdamOptions options_;
    std::vector<Tensor> m_;
    std::vector<Tensor> v_;
    std::uint64_t t_ = 0;
};

// Builds a scalar loss in a fresh graph from the current parameter values.
using LossBuilder = std::function<ad::NodeId(ad::Graph&, const ParameterStore&)>;

struct GradCheckResult {
    double max_relative_error = 0.0;
    std::size_t worst_parameter = 0;
    std::size_t worst_element = 0;
    double analytic = 0.0;
    double numeric = 0.0;
};

// Compares backprop gradients against central differences for every entry
// of every parameter. Relative error is
// |analytic - numeric| / max(1, |analytic|, |numeric|).
// The builder must be deterministic (dropout off, noise fixed).
GradCheckResult grad_check(const LossBuilder& build, ParameterStore& store, double eps = 1e-6);

}  // namespace vrin
