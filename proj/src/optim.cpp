#include "vrin/optim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vrin {

Adam::Adam(const ParameterStore& store, AdamOptions options) : options_(options) {
    m_.reserve(store.size());
    v_.reserve(store.size());
    for (std::size_t i = 0; i < store.size(); ++i) {
        m_.emplace_back(store.value(i).shape(), 0.0);
        v_.emplace_back(store.value(i).shape(), 0.0);
    }
}

void Adam::step(ParameterStore& store) {
    if (store.size() != m_.size()) throw std::logic_error("Adam: parameter store changed size");
    ++t_;
    const double b1 = options_.beta1, b2 = options_.beta2;
    const double correction1 = 1.0 - std::pow(b1, static_cast<double>(t_));
    const double correction2 = 1.0 - std::pow(b2, static_cast<double>(t_));
    for (std::size_t p = 0; p < store.size(); ++p) {
        Tensor& w = store.value(p);
        const Tensor& g = store.grad(p);
        Tensor& m = m_[p];
        Tensor& v = v_[p];
        for (std::size_t j = 0; j < w.size(); ++j) {
            const double grad = g[j] + options_.weight_decay * w[j];
            m[j] = b1 * m[j] + (1.0 - b1) * grad;
            v[j] = b2 * v[j] + (1.0 - b2) * grad * grad;
            const double m_hat = m[j] / correction1;
            const double v_hat = v[j] / correction2;
            w[j] -= options_.learning_rate * m_hat / (std::sqrt(v_hat) + options_.epsilon);
        }
    }
}

namespace {

double evaluate(const LossBuilder& build, const ParameterStore& store) {
    ad::Graph g;
    return g.value(build(g, store)).item();
}

}  // namespace

GradCheckResult grad_check(const LossBuilder& build, ParameterStore& store, double eps) {
    if (!(eps > 0.0 && eps <= 1e-2)) throw std::invalid_argument("grad_check: eps must lie in (0, 1e-2]");

    store.zero_grad();
    {
        ad::Graph g;
        const auto loss = build(g, store);
        g.backward(loss);
        g.accumulate_parameter_grads(store);
    }

    GradCheckResult result;
    for (std::size_t p = 0; p < store.size(); ++p) {
        for (std::size_t j = 0; j < store.value(p).size(); ++j) {
            double& w = store.value(p)[j];
            const double saved = w;
            w = saved + eps;
            const double up = evaluate(build, store);
            w = saved - eps;
            const double down = evaluate(build, store);
            w = saved;
            const double numeric = (up - down) / (2.0 * eps);
            const double analytic = store.grad(p)[j];
            const double denom = std::max({1.0, std::fabs(analytic), std::fabs(numeric)});
            const double err = std::fabs(analytic - numeric) / denom;
            if (err > result.max_relative_error) {
                result = {err, p, j, analytic, numeric};
            }
        }
    }
    return result;
}

}  // namespace vrin
