#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "vrin/config.hpp"
#include "vrin/data.hpp"
#include "vrin/graph.hpp"

namespace vrin {

// Scalar values of every loss term for one forward pass (or an average of
// several).
struct LossBreakdown {
    double vae = 0.0;
    double reg = 0.0;
    double pred = 0.0;
    double cons = 0.0;
    double total = 0.0;
    double l1_penalty = 0.0;  // included in `vae`
};

namespace loss {

// 0.5 * sum(exp(lv) + mu^2 - 1 - lv) over every entry.
ad::NodeId kl_diag_gaussian(ad::Graph& g, ad::NodeId mean, ad::NodeId log_var);

// sum over entries of weight * log N(x | mean, exp(log_var)).
ad::NodeId gaussian_log_likelihood(ad::Graph& g, const Tensor& x, ad::NodeId mean, ad::NodeId log_var,
                                   const Tensor& weight);

struct VaeLoss {
    ad::NodeId total;       // -ELBO summed over rows + l1 penalty
    ad::NodeId penalty;     // lambda1 * sum |theta, phi|
    ad::NodeId neg_elbo;
};

VaeLoss loss_vae(ad::Graph& g, ad::NodeId log_likelihood, ad::NodeId kl, std::span<const ad::NodeId> vae_params,
                 double lambda1);

struct RegLoss {
    ad::NodeId value;
    bool no_observations = false;  // value is a constant 0
};

// Mean absolute error between x_tilde and c over observed entries.
RegLoss loss_reg(ad::Graph& g, const Tensor& x_tilde, const Tensor& mask, ad::NodeId combined);

// Mean binary cross-entropy from logits.
ad::NodeId loss_pred(ad::Graph& g, ad::NodeId logits, const Tensor& labels);

// Mean absolute difference over all entries.
ad::NodeId loss_consistency(ad::Graph& g, ad::NodeId forward, ad::NodeId backward);

struct Terms {
    ad::NodeId vae;
    ad::NodeId reg;
    ad::NodeId pred;
    ad::NodeId cons;  // ignored in uni mode
};

// alpha * vae + beta * reg + pred (+ xi * cons when bidirectional).
ad::NodeId loss_total(ad::Graph& g, const Terms& terms, double alpha, double beta, double xi, Direction mode);

}  // namespace loss

struct ImputationMetrics {
    double mae = 0.0;
    double mre = 0.0;
    double mse = 0.0;
};

// `estimate(entry)` returns the model's value for a removed entry, in the
// same units as entry.value.
ImputationMetrics imputation_metrics(const RemovalRecord& record,
                                     const std::function<double(const RemovedEntry&)>& estimate);
ImputationMetrics imputation_metrics(std::span<const double> truth, std::span<const double> estimate);

struct ClassificationMetrics {
    double auc = 0.0;
    double auprc = 0.0;
};

// Mann-Whitney AUC with ties counted as one half. Throws if labels hold a
// single class.
double roc_auc(std::span<const double> scores, std::span<const int> labels);
// Average precision over distinct score thresholds. Throws without positives.
double average_precision(std::span<const double> scores, std::span<const int> labels);
ClassificationMetrics classification_metrics(std::span<const double> scores, std::span<const int> labels);

struct Summary {
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation, 0 for one value
};

Summary summarize(std::span<const double> values);
// "0.8347 ± 0.0125"
std::string format_summary(const Summary& s, int digits = 4);

}  // namespace vrin
