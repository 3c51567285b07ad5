#include "vrin/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "vrin/errors.hpp"

namespace vrin {

namespace loss {

ad::NodeId kl_diag_gaussian(ad::Graph& g, ad::NodeId mean, ad::NodeId log_var) {
    if (g.value(mean).shape() != g.value(log_var).shape()) {
        throw ShapeError("kl_diag_gaussian: mean " + shape_string(g.value(mean).shape()) + " vs log_var " +
                         shape_string(g.value(log_var).shape()));
    }
    auto inner = g.sub(g.add(g.exp(log_var), g.square(mean)), g.add_scalar(log_var, 1.0));
    return g.scale(g.sum(inner), 0.5);
}

ad::NodeId gaussian_log_likelihood(ad::Graph& g, const Tensor& x, ad::NodeId mean, ad::NodeId log_var,
                                   const Tensor& weight) {
    const double half_log_two_pi = 0.5 * std::log(2.0 * std::numbers::pi);
    auto residual = g.sub(g.constant(x), mean);
    auto scaled = g.mul(g.square(residual), g.exp(g.neg(log_var)));
    // -0.5 log 2pi - 0.5 lv - 0.5 r^2 / exp(lv)
    auto per_entry = g.add_scalar(g.scale(g.add(log_var, scaled), -0.5), -half_log_two_pi);
    return g.sum(g.mul_const(per_entry, weight));
}

VaeLoss loss_vae(ad::Graph& g, ad::NodeId log_likelihood, ad::NodeId kl, std::span<const ad::NodeId> vae_params,
                 double lambda1) {
    auto neg_elbo = g.sub(kl, log_likelihood);
    ad::NodeId penalty = g.constant(Tensor::scalar(0.0));
    for (auto p : vae_params) penalty = g.add(penalty, g.sum(g.abs(p)));
    penalty = g.scale(penalty, lambda1);
    return {g.add(neg_elbo, penalty), penalty, neg_elbo};
}

RegLoss loss_reg(ad::Graph& g, const Tensor& x_tilde, const Tensor& mask, ad::NodeId combined) {
    if (x_tilde.shape() != mask.shape() || x_tilde.shape() != g.value(combined).shape()) {
        throw ShapeError("loss_reg: x_tilde " + shape_string(x_tilde.shape()) + ", mask " +
                         shape_string(mask.shape()) + ", estimate " + shape_string(g.value(combined).shape()));
    }
    double observed = 0.0;
    for (double m : mask.values()) observed += m;
    if (observed == 0.0) return {g.constant(Tensor::scalar(0.0)), true};
    Tensor target(x_tilde.shape(), 0.0);
    for (std::size_t i = 0; i < target.size(); ++i) target[i] = x_tilde[i] * mask[i];
    auto diff = g.sub(g.constant(std::move(target)), g.mul_const(combined, mask));
    return {g.scale(g.sum(g.abs(diff)), 1.0 / observed), false};
}

ad::NodeId loss_pred(ad::Graph& g, ad::NodeId logits, const Tensor& labels) {
    for (double y : labels.values()) {
        if (y != 0.0 && y != 1.0) throw std::invalid_argument("loss_pred: labels must be 0 or 1");
    }
    return g.bce_with_logits(logits, labels);
}

ad::NodeId loss_consistency(ad::Graph& g, ad::NodeId forward, ad::NodeId backward) {
    return g.mean(g.abs(g.sub(forward, backward)));
}

ad::NodeId loss_total(ad::Graph& g, const Terms& t, double alpha, double beta, double xi, Direction mode) {
    auto total = g.add(g.add(g.scale(t.vae, alpha), g.scale(t.reg, beta)), t.pred);
    if (mode == Direction::Bi) total = g.add(total, g.scale(t.cons, xi));
    return total;
}

}  // namespace loss

ImputationMetrics imputation_metrics(std::span<const double> truth, std::span<const double> estimate) {
    if (truth.empty()) throw std::invalid_argument("imputation metrics need at least one ground-truth entry");
    if (truth.size() != estimate.size()) throw ShapeError("imputation metrics: truth and estimate sizes differ");
    double abs_err = 0.0, sq_err = 0.0, abs_truth = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const double e = estimate[i] - truth[i];
        abs_err += std::fabs(e);
        sq_err += e * e;
        abs_truth += std::fabs(truth[i]);
    }
    const auto n = static_cast<double>(truth.size());
    ImputationMetrics m;
    m.mae = abs_err / n;
    m.mse = sq_err / n;
    if (abs_truth == 0.0) {
        if (abs_err != 0.0) throw NumericError("MRE undefined: ground truth is all zero but errors are not");
        m.mre = 0.0;
    } else {
        m.mre = abs_err / abs_truth;
    }
    return m;
}

ImputationMetrics imputation_metrics(const RemovalRecord& record,
                                     const std::function<double(const RemovedEntry&)>& estimate) {
    std::vector<double> truth, est;
    truth.reserve(record.size());
    est.reserve(record.size());
    for (const auto& e : record.entries) {
        truth.push_back(e.value);
        est.push_back(estimate(e));
    }
    return imputation_metrics(truth, est);
}

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw ShapeError("roc_auc: scores and labels differ in length");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Sum of (1-based, tie-averaged) ranks of the positives, kept doubled so
    // every partial sum is an exact integer.
    double doubled_rank_sum = 0.0;
    std::size_t positives = 0;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        const double doubled_avg_rank = static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) {
            if (labels[order[k]] == 1) {
                doubled_rank_sum += doubled_avg_rank;
                ++positives;
            }
        }
        i = j;
    }
    const std::size_t negatives = scores.size() - positives;
    if (positives == 0 || negatives == 0) throw std::invalid_argument("AUC undefined: labels contain a single class");
    const auto p = static_cast<double>(positives), q = static_cast<double>(negatives);
    const double u = 0.5 * doubled_rank_sum - p * (p + 1.0) / 2.0;
    return u / (p * q);
}

double average_precision(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw ShapeError("average_precision: scores and labels differ in length");
    const auto total_pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
    if (total_pos == 0) throw std::invalid_argument("AUPRC undefined: no positive labels");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    double ap = 0.0;
    std::size_t tp = 0, seen = 0, prev_tp = 0;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        for (std::size_t k = i; k < j; ++k) tp += labels[order[k]] == 1 ? 1 : 0;
        seen = j;
        if (tp > prev_tp) {
            const double precision = static_cast<double>(tp) / static_cast<double>(seen);
            ap += precision * static_cast<double>(tp - prev_tp) / static_cast<double>(total_pos);
        }
        prev_tp = tp;
        i = j;
    }
    return ap;
}

ClassificationMetrics classification_metrics(std::span<const double> scores, std::span<const int> labels) {
    return {roc_auc(scores, labels), average_precision(scores, labels)};
}

Summary summarize(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("summarize: no values");
    if (std::all_of(values.begin(), values.end(), [&](double v) { return v == values[0]; })) return {values[0], 0.0};
    const auto n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double sq = 0.0;
    for (double v : values) sq += (v - mean) * (v - mean);
    return {mean, values.size() > 1 ? std::sqrt(sq / (n - 1.0)) : 0.0};
}

std::string format_summary(const Summary& s, int digits) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%.*f ± %.*f", digits, s.mean, digits, s.stddev);
    return buf;
}

}  // namespace vrin
