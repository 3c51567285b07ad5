#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vrin/config.hpp"
#include "vrin/data.hpp"
#include "vrin/model.hpp"
#include "vrin/objectives.hpp"

namespace vrin {

struct EpochRecord {
    std::size_t epoch = 0;  // 1-based
    LossBreakdown loss;     // mean over the epoch's mini-batches
};

struct RunReport {
    TrainConfig config;
    std::vector<EpochRecord> epochs;
    std::size_t train_samples = 0;
    bool early_stopped = false;
    double wall_seconds = 0.0;  // not written to report files
    // Ordered name -> formatted value, e.g. "auc" -> "0.8347 ± 0.0125".
    std::vector<std::pair<std::string, std::string>> metrics;
};

struct TrainResult {
    Model model;
    RunReport report;
};

// Mini-batch Adam on the composite loss. `normalized` must already be
// z-scored with `stats`; `config.features` is taken from the batch when 0.
TrainResult train(const MaskedBatch& normalized, const NormStats& stats, TrainConfig config);

// Eval-mode pass (no dropout, posterior-mean latent) over a normalized
// batch. Arrays are N*T*D sample-major in normalized units.
struct Inference {
    std::vector<double> probability;
    std::vector<double> completed;
    std::vector<double> uncertainty;
};

Inference infer(const Model& model, const MaskedBatch& normalized);

ClassificationMetrics evaluate_classification(const Model& model, const MaskedBatch& normalized);

// Reads completed values at the recorded positions, maps them back to
// original units and scores them against the record (original units).
ImputationMetrics evaluate_imputation(const Model& model, const MaskedBatch& normalized, const RemovalRecord& record);

struct CrossValidationOptions {
    std::size_t folds = 5;
    double removal = 0.0;  // fraction of observed entries hidden
    std::uint64_t seed = 0;
};

struct CrossValidationResult {
    std::vector<std::map<std::string, double>> per_fold;
    std::map<std::string, Summary> summary;
};

// Trains and evaluates one model per fold on a raw (unnormalized) dataset.
// Classification hides entries from the training folds only and reports
// auc/auprc; imputation hides entries from every split up front and reports
// mae/mre/mse plus the mean-fill baseline on the same entries.
CrossValidationResult crossvalidate(const MaskedBatch& raw, const TrainConfig& config,
                                    const CrossValidationOptions& options);

// Subset of `record` whose samples are listed in `samples`, re-indexed to
// positions within that list.
RemovalRecord restrict_record(const RemovalRecord& record, const std::vector<std::size_t>& samples);

}  // namespace vrin
