#include "vrin/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_map>

#include "vrin/baselines.hpp"
#include "vrin/errors.hpp"
#include "vrin/optim.hpp"
#include "vrin/rng.hpp"

namespace vrin {

namespace {

void check_finite(const LossBreakdown& l, std::size_t epoch, std::size_t batch) {
    const std::pair<const char*, double> terms[] = {
        {"l_vae", l.vae}, {"l_reg", l.reg}, {"l_pred", l.pred}, {"l_cons", l.cons}, {"l_total", l.total}};
    for (const auto& [name, v] : terms) {
        if (!std::isfinite(v)) {
            throw NumericError("non-finite loss term " + std::string(name) + " at epoch " + std::to_string(epoch) +
                               ", batch " + std::to_string(batch));
        }
    }
}

void accumulate(LossBreakdown& acc, const LossBreakdown& l) {
    acc.vae += l.vae;
    acc.reg += l.reg;
    acc.pred += l.pred;
    acc.cons += l.cons;
    acc.total += l.total;
    acc.l1_penalty += l.l1_penalty;
}

LossBreakdown divide(LossBreakdown l, double n) {
    l.vae /= n;
    l.reg /= n;
    l.pred /= n;
    l.cons /= n;
    l.total /= n;
    l.l1_penalty /= n;
    return l;
}

}  // namespace

TrainResult train(const MaskedBatch& data, const NormStats& stats, TrainConfig config) {
    if (config.features == 0) config.features = data.features;
    config.validate();
    if (data.features != config.features) {
        throw MismatchError("config expects " + std::to_string(config.features) + " features, data has " +
                            std::to_string(data.features));
    }
    if (data.samples == 0) throw DataError("train: empty dataset");

    const auto started = std::chrono::steady_clock::now();
    RngStreams rng(config.seed);
    TrainResult result{Model{config, {}, stats}, RunReport{}};
    Model& model = result.model;
    init_parameters(model.params, config, rng.init);
    Adam adam(model.params, AdamOptions{config.learning_rate, 0.9, 0.999, 1e-8, config.weight_decay});

    RunReport& report = result.report;
    report.config = config;
    report.train_samples = data.samples;

    std::vector<std::size_t> order(data.samples);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::normal_distribution<double> normal(0.0, 1.0);
    double best = std::numeric_limits<double>::infinity();
    std::size_t since_best = 0;

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng.shuffle);
        LossBreakdown sum;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t count = std::min(config.batch_size, order.size() - start);
            const MaskedBatch batch = data.subset(std::span(order).subspan(start, count));

            Tensor noise({data.steps * count, config.latent}, 0.0);
            for (auto& v : noise.values()) v = normal(rng.noise);

            ad::Graph graph;
            ForwardOptions options{true, &rng.dropout, &noise};
            ForwardPass pass;
            try {
                pass = forward(graph, model.params, config, batch, options);
            } catch (const NumericError& e) {
                throw NumericError(std::string(e.what()) + " (epoch " + std::to_string(epoch) + ", batch " +
                                   std::to_string(batches + 1) + ")");
            }
            const LossBreakdown losses = read_losses(graph, pass);
            check_finite(losses, epoch, batches + 1);

            graph.backward(pass.l_total);
            model.params.zero_grad();
            graph.accumulate_parameter_grads(model.params);
            adam.step(model.params);

            accumulate(sum, losses);
            ++batches;
        }
        const LossBreakdown mean = divide(sum, static_cast<double>(batches));
        report.epochs.push_back({epoch, mean});

        if (config.early_stopping_patience > 0) {
            if (mean.total < best) {
                best = mean.total;
                since_best = 0;
            } else if (++since_best >= config.early_stopping_patience) {
                report.early_stopped = true;
                break;
            }
        }
    }
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return result;
}

Inference infer(const Model& model, const MaskedBatch& data) {
    const std::size_t N = data.samples, T = data.steps, D = data.features;
    if (D != model.config.features) {
        throw MismatchError("model expects " + std::to_string(model.config.features) + " features, data has " +
                            std::to_string(D));
    }
    Inference out;
    out.probability.assign(N, 0.0);
    out.completed.assign(N * T * D, 0.0);
    out.uncertainty.assign(N * T * D, 0.0);
    const std::size_t chunk = std::max<std::size_t>(model.config.batch_size, 1);
    std::vector<std::size_t> idx;
    for (std::size_t start = 0; start < N; start += chunk) {
        const std::size_t count = std::min(chunk, N - start);
        idx.resize(count);
        std::iota(idx.begin(), idx.end(), start);
        const MaskedBatch batch = data.subset(idx);
        ad::Graph graph;
        const ForwardPass pass = forward(graph, model.params, model.config, batch, ForwardOptions{});
        const Tensor& prob = graph.value(pass.probability);
        const Tensor& u = graph.value(pass.u_bar);
        for (std::size_t i = 0; i < count; ++i) out.probability[start + i] = prob[i];
        for (std::size_t t = 0; t < T; ++t) {
            const Tensor& xc = graph.value(pass.completed[t]);
            for (std::size_t i = 0; i < count; ++i) {
                for (std::size_t d = 0; d < D; ++d) {
                    const auto o = data.offset(start + i, t, d);
                    out.completed[o] = xc.at(i, d);
                    out.uncertainty[o] = u.at(t * count + i, d);
                }
            }
        }
    }
    return out;
}

ClassificationMetrics evaluate_classification(const Model& model, const MaskedBatch& data) {
    const Inference inf = infer(model, data);
    return classification_metrics(inf.probability, data.labels);
}

ImputationMetrics evaluate_imputation(const Model& model, const MaskedBatch& data, const RemovalRecord& record) {
    if (record.empty()) throw std::invalid_argument("evaluate_imputation: empty removal record");
    const Inference inf = infer(model, data);
    return imputation_metrics(record, [&](const RemovedEntry& e) {
        return model.stats.denormalize(inf.completed[data.offset(e.sample, e.step, e.feature)], e.feature);
    });
}

RemovalRecord restrict_record(const RemovalRecord& record, const std::vector<std::size_t>& samples) {
    std::unordered_map<std::size_t, std::size_t> position;
    for (std::size_t i = 0; i < samples.size(); ++i) position.emplace(samples[i], i);
    RemovalRecord out;
    for (const auto& e : record.entries) {
        auto it = position.find(e.sample);
        if (it == position.end()) continue;
        RemovedEntry r = e;
        r.sample = it->second;
        out.entries.push_back(r);
    }
    return out;
}

CrossValidationResult crossvalidate(const MaskedBatch& raw, const TrainConfig& config,
                                    const CrossValidationOptions& options) {
    const auto folds = kfold_split(raw.samples, options.folds, options.seed);
    CrossValidationResult result;

    MaskedBatch imputation_data;
    RemovalRecord imputation_record;
    if (config.task == Task::Imputation) {
        if (!(options.removal > 0.0)) throw std::invalid_argument("imputation cross-validation needs removal > 0");
        std::tie(imputation_data, imputation_record) =
            remove_values(raw, options.removal, RemovalScope::AllSplits, derive_seed(options.seed, 11));
    }

    for (std::size_t f = 0; f < folds.size(); ++f) {
        std::vector<std::size_t> train_idx;
        for (std::size_t g = 0; g < folds.size(); ++g) {
            if (g != f) train_idx.insert(train_idx.end(), folds[g].begin(), folds[g].end());
        }
        std::sort(train_idx.begin(), train_idx.end());
        const auto& test_idx = folds[f];
        std::map<std::string, double> row;

        if (config.task == Task::Classification) {
            MaskedBatch data = raw;
            if (options.removal > 0.0) {
                data = remove_values(raw, options.removal, RemovalScope::TrainOnly, derive_seed(options.seed, 20 + f),
                                     train_idx)
                           .first;
            }
            const NormStats stats = compute_stats(data, train_idx);
            const MaskedBatch normalized = normalize(data, stats).first;
            const auto trained = train(normalized.subset(train_idx), stats, config);
            const auto m = evaluate_classification(trained.model, normalized.subset(test_idx));
            row["auc"] = m.auc;
            row["auprc"] = m.auprc;
        } else {
            const NormStats stats = compute_stats(imputation_data, train_idx);
            const MaskedBatch normalized = normalize(imputation_data, stats).first;
            const auto trained = train(normalized.subset(train_idx), stats, config);
            const MaskedBatch test = normalized.subset(test_idx);
            const RemovalRecord test_record = restrict_record(imputation_record, test_idx);
            const auto m = evaluate_imputation(trained.model, test, test_record);
            row["mae"] = m.mae;
            row["mre"] = m.mre;
            row["mse"] = m.mse;

            const MaskedBatch raw_test = imputation_data.subset(test_idx);
            const auto filled = fill(raw_test, FillMethod::Mean, stats);
            const auto baseline = imputation_metrics(
                test_record, [&](const RemovedEntry& e) { return filled[raw_test.offset(e.sample, e.step, e.feature)]; });
            row["mean_fill_mae"] = baseline.mae;
            row["mean_fill_mre"] = baseline.mre;
            row["mean_fill_mse"] = baseline.mse;
        }
        result.per_fold.push_back(std::move(row));
    }

    for (const auto& [name, _] : result.per_fold.front()) {
        std::vector<double> values;
        for (const auto& row : result.per_fold) values.push_back(row.at(name));
        result.summary[name] = summarize(values);
    }
    return result;
}

}  // namespace vrin
