#include <doctest.h>

#include <cmath>

#include "../support.hpp"
#include "vrin/baselines.hpp"
#include "vrin/errors.hpp"
#include "vrin/optim.hpp"
#include "vrin/report.hpp"
#include "vrin/trainer.hpp"

using namespace vrin;

TEST_CASE("one epoch on a toy set gives a finite loss and one report row") {
    const MaskedBatch raw = testing::random_batch(4, 6, 5, 0.4, 1);
    const auto [normalized, stats] = normalize(raw);
    const auto result = train(normalized, stats, testing::small_config(5));
    REQUIRE(result.report.epochs.size() == 1);
    CHECK(std::isfinite(result.report.epochs[0].loss.total));
    CHECK(result.report.train_samples == 4);
}

TEST_CASE("training is deterministic for a fixed seed") {
    const MaskedBatch raw = testing::random_batch(10, 6, 3, 0.4, 2);
    const auto [normalized, stats] = normalize(raw);
    TrainConfig c = testing::small_config(3);
    c.epochs = 3;
    c.dropout = 0.2;
    c.direction = Direction::Bi;
    const auto a = train(normalized, stats, c);
    const auto b = train(normalized, stats, c);
    CHECK(a.model.params == b.model.params);
    CHECK(format_report(a.report) == format_report(b.report));
    c.seed = 1;
    CHECK_FALSE(train(normalized, stats, c).model.params == a.model.params);
}

TEST_CASE("diagonal-masked weights stay zero through training") {
    const MaskedBatch raw = testing::random_batch(8, 5, 4, 0.5, 3);
    const auto [normalized, stats] = normalize(raw);
    TrainConfig c = testing::small_config(4);
    c.epochs = 4;
    const auto r = train(normalized, stats, c);
    for (const char* name : {"fwd.w_ups", "fwd.w_tau"}) {
        const Tensor& w = r.model.params.value(name);
        for (std::size_t d = 0; d < 4; ++d) CHECK(w.at(d, d) == 0.0);
    }
}

TEST_CASE("training reduces the loss on learnable synthetic data") {
    SyntheticOptions o;
    o.patients = 60;
    o.steps = 8;
    o.features = 4;
    o.seed = 4;
    const MaskedBatch raw = assemble(generate_synthetic(o), 4, 1.0, 8);
    const auto [normalized, stats] = normalize(raw);
    TrainConfig c = testing::small_config(4);
    c.time_steps = 8;
    c.epochs = 30;
    c.batch_size = 16;
    const auto r = train(normalized, stats, c);
    CHECK(r.report.epochs.back().loss.total < r.report.epochs.front().loss.total);
}

TEST_CASE("feature mismatch is reported as a mismatch") {
    const MaskedBatch raw = testing::random_batch(4, 6, 5, 0.4, 1);
    const auto [normalized, stats] = normalize(raw);
    TrainConfig c = testing::small_config(3);
    CHECK_THROWS_AS(train(normalized, stats, c), MismatchError);
    const auto model = train(normalized, stats, testing::small_config(5)).model;
    CHECK_THROWS_AS(infer(model, testing::random_batch(2, 6, 4, 0.3, 2)), MismatchError);
}

TEST_CASE("evaluation is repeatable and eval mode is deterministic") {
    const MaskedBatch raw = testing::random_batch(12, 6, 3, 0.4, 6);
    const auto [normalized, stats] = normalize(raw);
    TrainConfig c = testing::small_config(3);
    c.dropout = 0.3;
    const auto model = train(normalized, stats, c).model;
    const Inference a = infer(model, normalized);
    const Inference b = infer(model, normalized);
    CHECK(a.probability == b.probability);
    CHECK(a.completed == b.completed);
    for (double p : a.probability) CHECK((p > 0.0 && p < 1.0));
}

TEST_CASE("a model whose estimates equal the training mean scores exactly like mean fill") {
    const MaskedBatch raw = testing::random_batch(6, 5, 3, 0.3, 8);
    const auto [hidden, record] = remove_values(raw, 0.2, RemovalScope::AllSplits, 9);
    const auto [normalized, stats] = normalize(hidden);
    Model model = initialize_model(testing::small_config(3), stats);
    // Zero every parameter: c = 0 in normalized units, i.e. the mean.
    for (std::size_t i = 0; i < model.params.size(); ++i) model.params.value(i).fill(0.0);
    const auto m = evaluate_imputation(model, normalized, record);
    const auto filled = fill(hidden, FillMethod::Mean, stats);
    const auto b =
        imputation_metrics(record, [&](const RemovedEntry& e) { return filled[hidden.offset(e.sample, e.step, e.feature)]; });
    CHECK(m.mae == doctest::Approx(b.mae).epsilon(1e-12));
    CHECK(m.mse == doctest::Approx(b.mse).epsilon(1e-12));
}

TEST_CASE("cross-validation aggregates one row per fold") {
    SyntheticOptions o;
    o.patients = 30;
    o.steps = 6;
    o.features = 3;
    o.positive_rate = 0.3;
    o.seed = 10;
    const MaskedBatch raw = assemble(generate_synthetic(o), 3, 1.0, 6);
    TrainConfig c = testing::small_config(3);
    c.time_steps = 6;
    c.batch_size = 8;
    const auto cls = crossvalidate(raw, c, {3, 0.05, 1});
    CHECK(cls.per_fold.size() == 3);
    CHECK(cls.summary.count("auc") == 1);

    c.task = Task::Imputation;
    const auto imp = crossvalidate(raw, c, {3, 0.1, 1});
    CHECK(imp.per_fold.size() == 3);
    CHECK(imp.summary.count("mae") == 1);
    CHECK(imp.summary.count("mean_fill_mae") == 1);
}

TEST_CASE("restricting a removal record re-indexes samples") {
    RemovalRecord r{{{0, 0, 0, 1.0}, {3, 1, 1, 2.0}, {5, 2, 0, 3.0}}};
    const auto sub = restrict_record(r, {5, 3});
    REQUIRE(sub.size() == 2);
    CHECK(sub.entries[0].sample == 1);
    CHECK(sub.entries[1].sample == 0);
}

TEST_CASE("gradient check on a small full model, both directions") {
    const MaskedBatch raw = testing::random_batch(3, 4, 3, 0.4, 12);
    const MaskedBatch batch = normalize(raw).first;
    for (const Direction dir : {Direction::Uni, Direction::Bi}) {
        TrainConfig c = testing::small_config(3, 4, 2);
        c.direction = dir;
        ParameterStore store;
        std::mt19937_64 rng(5);
        init_parameters(store, c, rng);
        // Zero-initialized biases put some rectifiers exactly on their kink,
        // where central differences are meaningless; move off it.
        std::normal_distribution<double> jitter(0.0, 0.1);
        for (std::size_t i = 0; i < store.size(); ++i)
            for (auto& v : store.value(i).values()) v += jitter(rng);
        Tensor noise({batch.steps * batch.samples, c.latent}, 0.0);
        std::normal_distribution<double> normal(0.0, 1.0);
        for (auto& v : noise.values()) v = normal(rng);
        const auto res = grad_check(
            [&](ad::Graph& g, const ParameterStore& s) {
                return forward(g, s, c, batch, ForwardOptions{false, nullptr, &noise}).l_total;
            },
            store);
        CAPTURE(store.name(res.worst_parameter));
        CHECK(res.max_relative_error < 1e-5);
    }
}
