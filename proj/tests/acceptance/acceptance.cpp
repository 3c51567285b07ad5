// Acceptance suite: one PASS/FAIL line per criterion. Exits 0 once every
// criterion has been reported; with --strict, exits 1 if any failed.
// Criteria 7 and 8 train full-size models and dominate the runtime (a few
// minutes on one core).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "vrin/baselines.hpp"
#include "vrin/checkpoint.hpp"
#include "vrin/cli.hpp"
#include "vrin/io.hpp"
#include "vrin/objectives.hpp"
#include "vrin/optim.hpp"
#include "vrin/recurrent.hpp"
#include "vrin/rng.hpp"
#include "vrin/trainer.hpp"

using namespace vrin;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void run(int id, const char* title, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::printf("[%s] criterion %d: %s -- %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), f, a, b, c, d);
    return buf;
}

// i.i.d. missingness on an hourly grid, first entry of each sample observed.
MaskedBatch random_batch(std::size_t n, std::size_t t, std::size_t d, double missing, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    MaskedBatch b(n, t, d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t s = 0; s < t; ++s) {
            b.timestamps[i * t + s] = static_cast<double>(s);
            for (std::size_t k = 0; k < d; ++k) {
                if (unit(rng) >= missing || (s == 0 && k == 0)) {
                    b.mask[b.offset(i, s, k)] = 1.0;
                    b.values[b.offset(i, s, k)] = normal(rng);
                }
            }
        }
        b.labels[i] = static_cast<int>(i % 2);
        b.patient_ids[i] = "p" + std::to_string(i);
    }
    rebuild_delta(b);
    return b;
}

Tensor normal_tensor(Shape shape, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> normal(0.0, scale);
    Tensor t(shape, 0.0);
    for (auto& v : t.values()) v = normal(rng);
    return t;
}

// Criterion 1 ---------------------------------------------------------------

Outcome gradient_oracle() {
    const MaskedBatch batch = normalize(random_batch(4, 6, 5, 0.4, 101)).first;
    double worst = 0.0;
    std::string worst_name;
    for (const Direction dir : {Direction::Uni, Direction::Bi}) {
        TrainConfig c = TrainConfig::preset(Task::Classification);
        c.features = 5;
        c.hidden = 8;
        c.latent = 3;
        c.time_steps = 6;
        c.dropout = 0.0;
        c.direction = dir;
        ParameterStore store;
        std::mt19937_64 rng(7);
        init_parameters(store, c, rng);
        // Random point away from the rectifier kinks that zero biases sit on.
        std::normal_distribution<double> jitter(0.0, 0.1);
        for (std::size_t i = 0; i < store.size(); ++i)
            for (auto& v : store.value(i).values()) v += jitter(rng);
        const Tensor noise = normal_tensor({6 * 4, 3}, rng);
        const auto res = grad_check(
            [&](ad::Graph& g, const ParameterStore& s) {
                return forward(g, s, c, batch, ForwardOptions{false, nullptr, &noise}).l_total;
            },
            store, 1e-6);
        if (res.max_relative_error >= worst) {
            worst = res.max_relative_error;
            worst_name = store.name(res.worst_parameter) + " (" + std::string(to_string(dir)) + ")";
        }
    }
    return {worst < 1e-5, fmt("max relative error %.3e over every parameter, uni and bi; worst at ", worst) + worst_name};
}

// Criterion 2 ---------------------------------------------------------------

Outcome decay_range() {
    const std::size_t D = 6, H = 7, rows = 100, draws = 100;  // 10^4 input rows
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> scale_pick(0.1, 30.0);
    std::uniform_real_distribution<double> gap(0.0, 96.0);
    std::uniform_real_distribution<double> sigma(0.0, std::exp(5.0));
    std::size_t checked = 0, violations = 0;
    double min_seen = 1.0;
    for (std::size_t k = 0; k < draws; ++k) {
        ParameterStore store;
        rnn::add_parameters(store, {D, H}, "c.", rng);
        const double s = scale_pick(rng);
        for (const char* name : {"c.w_u", "c.b_u", "c.w_gamma", "c.b_gamma"}) {
            store.value(name) = normal_tensor(store.value(name).shape(), rng, s);
        }
        Tensor u({rows, D}, 0.0), delta({rows, D}, 0.0);
        for (auto& v : u.values()) v = sigma(rng);
        for (auto& v : delta.values()) v = gap(rng);
        ad::Graph g;
        const auto cell = rnn::bind(g, store, {D, H}, "c.");
        const auto gate = rnn::uncertainty_gated_estimate(g, cell, g.input(normal_tensor({rows, D}, rng)), g.input(u));
        const auto hist = rnn::temporal_decayed_history(g, cell, g.input(normal_tensor({rows, H}, rng)), delta);
        for (const ad::NodeId id : {gate.decay, hist.decay}) {
            for (double v : g.value(id).values()) {
                ++checked;
                if (!(v > 0.0 && v <= 1.0)) ++violations;
                min_seen = std::min(min_seen, v);
            }
        }
    }
    return {violations == 0, fmt("%.0f decay values from 10^4 input rows, %.0f outside (0, 1], smallest %.3e",
                                 static_cast<double>(checked), static_cast<double>(violations), min_seen)};
}

// Criterion 3 ---------------------------------------------------------------

Outcome preservation() {
    std::size_t batches = 0, mismatches = 0;
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        const MaskedBatch batch = normalize(random_batch(5, 7, 4, 0.2 + 0.05 * static_cast<double>(seed), 300 + seed)).first;
        TrainConfig c = TrainConfig::preset(Task::Imputation);
        c.features = 4;
        c.hidden = 6;
        c.latent = 3;
        c.time_steps = 7;
        c.direction = seed % 2 ? Direction::Bi : Direction::Uni;
        c.variant = seed % 3 ? Variant::VRinFull : Variant::VRin;
        ParameterStore store;
        std::mt19937_64 rng(seed);
        init_parameters(store, c, rng);
        std::mt19937_64 dropout(seed + 1);
        const Tensor noise = normal_tensor({7 * 5, 3}, rng);
        ad::Graph g;
        const auto pass = forward(g, store, c, batch, ForwardOptions{seed % 4 == 0, &dropout, &noise});
        ++batches;

        const TimeMajor tm = time_major(batch);
        const Tensor& x_bar = g.value(pass.x_bar);
        const Tensor& u_bar = g.value(pass.u_bar);
        for (std::size_t i = 0; i < tm.mask_all.size(); ++i) {
            if (tm.mask_all[i] == 1.0 && (x_bar[i] != tm.x_all[i] || u_bar[i] != 0.0)) ++mismatches;
        }
        std::vector<std::vector<ad::NodeId>> completions{pass.completed, pass.forward.trace.completed};
        if (pass.bidirectional) completions.push_back(pass.bidirectional->backward_completed);
        for (const auto& steps : completions) {
            for (std::size_t t = 0; t < steps.size(); ++t) {
                const Tensor& xc = g.value(steps[t]);
                for (std::size_t i = 0; i < xc.size(); ++i) {
                    if (tm.mask[t][i] == 1.0 && xc[i] != tm.x_tilde[t][i]) ++mismatches;
                }
            }
        }
    }
    return {mismatches == 0, fmt("%.0f random batches (uni/bi, gated/ungated, train/eval); %.0f observed entries altered",
                                 static_cast<double>(batches), static_cast<double>(mismatches))};
}

// Criterion 4 ---------------------------------------------------------------

Outcome zero_diagonal() {
    const std::size_t D = 5, H = 6;
    std::mt19937_64 rng(404);
    ParameterStore store;
    rnn::add_parameters(store, {D, H}, "c.", rng);
    // Store large diagonals: only the masking can make the sensitivity vanish.
    for (const char* name : {"c.w_ups", "c.w_tau"}) {
        store.value(name) = normal_tensor({D, D}, rng);
        for (std::size_t d = 0; d < D; ++d) store.value(name).at(d, d) = 50.0;
    }
    store.value("c.w_u") = normal_tensor({D, D}, rng, 0.3);

    const Tensor x_bar = normal_tensor({3, D}, rng), u_bar = normal_tensor({3, D}, rng), x_r = normal_tensor({3, D}, rng);
    double max_self = 0.0, min_cross = INFINITY;
    for (double h : {1e-6, 1e-3, 1.0}) {
        for (std::size_t d = 0; d < D; ++d) {
            Tensor xb = x_bar, xr = x_r;
            for (std::size_t r = 0; r < 3; ++r) {
                xb.at(r, d) += h;
                xr.at(r, d) += h;
            }
            ad::Graph g;
            const auto cell = rnn::bind(g, store, {D, H}, "c.");
            const Tensor ups0 = g.value(rnn::uncertainty_gated_estimate(g, cell, g.input(x_bar), g.input(u_bar)).estimate);
            const Tensor ups1 = g.value(rnn::uncertainty_gated_estimate(g, cell, g.input(xb), g.input(u_bar)).estimate);
            const Tensor tau0 = g.value(rnn::cross_feature_estimate(g, cell, g.input(x_r)));
            const Tensor tau1 = g.value(rnn::cross_feature_estimate(g, cell, g.input(xr)));
            for (std::size_t r = 0; r < 3; ++r) {
                max_self = std::max({max_self, std::abs(ups1.at(r, d) - ups0.at(r, d)) / h,
                                     std::abs(tau1.at(r, d) - tau0.at(r, d)) / h});
                for (std::size_t e = 0; e < D; ++e) {
                    if (e == d) continue;
                    min_cross = std::min(min_cross, std::abs(tau1.at(r, e) - tau0.at(r, e)) +
                                                        std::abs(ups1.at(r, e) - ups0.at(r, e)));
                }
            }
        }
    }
    return {max_self == 0.0 && min_cross > 0.0,
            fmt("self-sensitivity max %.1e (stored diagonal 50); cross-feature sensitivity min %.2e", max_self,
                min_cross)};
}

// Criterion 5 ---------------------------------------------------------------

Outcome metric_oracles() {
    std::mt19937_64 rng(505);
    double auc_err = 0.0, imp_err = 0.0;
    for (int c = 0; c < 200; ++c) {
        const std::size_t n = 2 + rng() % 80;
        std::vector<double> s(n);
        std::vector<int> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = c % 2 ? static_cast<double>(rng() % 8) : std::uniform_real_distribution<double>(0, 1)(rng);
            y[i] = static_cast<int>(rng() % 2);
        }
        y[0] = 0;
        y[1] = 1;
        double wins = 0.0, pairs = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (y[i] == 1 && y[j] == 0) {
                    pairs += 1.0;
                    wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
                }
        auc_err = std::max(auc_err, std::abs(roc_auc(s, y) - wins / pairs));

        std::vector<double> truth(n), est(n);
        std::normal_distribution<double> normal(0.0, 3.0);
        for (std::size_t i = 0; i < n; ++i) {
            truth[i] = normal(rng);
            est[i] = normal(rng);
        }
        double ae = 0.0, at = 0.0, se = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            ae += std::abs(truth[i] - est[i]);
            at += std::abs(truth[i]);
            se += (truth[i] - est[i]) * (truth[i] - est[i]);
        }
        const auto m = imputation_metrics(truth, est);
        const double nn = static_cast<double>(n);
        imp_err = std::max({imp_err, std::abs(m.mae - ae / nn), std::abs(m.mre - ae / at), std::abs(m.mse - se / nn)});
    }
    ad::Graph g;
    const double kl = g.value(loss::kl_diag_gaussian(g, g.input(Tensor::row({1.0})), g.input(Tensor::row({0.0})))).item();
    const double kl_err = std::abs(kl - 0.5);
    return {auc_err <= 1e-12 && imp_err <= 1e-12 && kl_err <= 1e-12,
            fmt("AUC vs pairwise oracle max err %.1e (200 cases); MAE/MRE/MSE max err %.1e; KL(mu=1, logvar=0) err %.1e",
                auc_err, imp_err, kl_err)};
}

// Criterion 6 ---------------------------------------------------------------

Outcome ablation_superset() {
    bool identical = true, gate_matters = true;
    for (const Direction dir : {Direction::Uni, Direction::Bi}) {
        const MaskedBatch batch = normalize(random_batch(6, 8, 5, 0.5, 606)).first;
        TrainConfig full = TrainConfig::preset(Task::Classification);
        full.features = 5;
        full.hidden = 8;
        full.latent = 3;
        full.time_steps = 8;
        full.direction = dir;
        TrainConfig plain = full;
        plain.variant = Variant::VRin;

        ParameterStore store;
        std::mt19937_64 rng(6);
        init_parameters(store, full, rng);
        const Tensor noise = normal_tensor({8 * 6, 3}, rng);
        auto losses = [&](const TrainConfig& c) {
            ad::Graph g;
            return read_losses(g, forward(g, store, c, batch, ForwardOptions{false, nullptr, &noise}));
        };
        const LossBreakdown gated_random = losses(full);
        const LossBreakdown ungated = losses(plain);
        // W_u = 0, b_u = 0 gives upsilon = exp(-relu(0)) = 1 exactly.
        for (const std::string prefix : {"fwd.", "bwd."}) {
            if (!store.contains(prefix + "w_u")) continue;
            store.value(prefix + "w_u").fill(0.0);
            store.value(prefix + "b_u").fill(0.0);
        }
        const LossBreakdown forced = losses(full);
        identical = identical && forced.total == ungated.total && forced.vae == ungated.vae &&
                    forced.reg == ungated.reg && forced.pred == ungated.pred && forced.cons == ungated.cons;
        gate_matters = gate_matters && gated_random.total != ungated.total;
    }
    return {identical && gate_matters,
            std::string("gated loss with upsilon forced to 1 ") + (identical ? "equals" : "DIFFERS FROM") +
                " the ungated variant bit-for-bit (uni and bi); an active gate " +
                (gate_matters ? "changes" : "does NOT change") + " the loss"};
}

// Criterion 7 ---------------------------------------------------------------

Outcome end_to_end_imputation() {
    SyntheticOptions o;
    o.patients = 500;
    o.steps = 24;
    o.features = 8;
    o.missing_rate = 0.5;
    o.seed = 7;
    const MaskedBatch raw = assemble(generate_synthetic(o), o.features, o.window_hours, o.steps);
    const auto [hidden, record] = remove_values(raw, 0.10, RemovalScope::AllSplits, derive_seed(7, 11));
    const auto [normalized, stats] = normalize(hidden);

    TrainConfig c = TrainConfig::preset(Task::Imputation);
    c.time_steps = 24;
    c.direction = Direction::Bi;
    c.variant = Variant::VRinFull;
    const auto trained = train(normalized, stats, c);
    const auto model_m = evaluate_imputation(trained.model, normalized, record);
    const auto filled = fill(hidden, FillMethod::Mean, stats);
    const auto mean_m =
        imputation_metrics(record, [&](const RemovedEntry& e) { return filled[hidden.offset(e.sample, e.step, e.feature)]; });

    const double improvement = 1.0 - model_m.mae / mean_m.mae;
    const double cons_first = trained.report.epochs.front().loss.cons;
    const double cons_last = trained.report.epochs.back().loss.cons;
    const bool mae_ok = improvement >= 0.15;
    const bool cons_ok = cons_last <= 0.5 * cons_first;
    std::string detail = fmt("MAE %.4f vs mean-fill %.4f (%.1f%% lower, need >= 15%%) ", model_m.mae, mean_m.mae,
                             100.0 * improvement);
    detail += mae_ok ? "[ok]" : "[short]";
    detail += fmt("; consistency epoch 1 %.4f -> epoch %.0f %.4f (ratio %.2f, need <= 0.50) ", cons_first,
                  static_cast<double>(trained.report.epochs.size()), cons_last, cons_last / cons_first);
    detail += cons_ok ? "[ok]" : "[short]";
    return {mae_ok && cons_ok, detail};
}

// Criterion 8 ---------------------------------------------------------------

Outcome end_to_end_classification() {
    SyntheticOptions o;
    o.patients = 500;
    o.steps = 24;
    o.features = 8;
    o.missing_rate = 0.5;
    o.positive_rate = 0.15;
    o.seed = 8;
    const MaskedBatch raw = assemble(generate_synthetic(o), o.features, o.window_hours, o.steps);
    const auto folds = kfold_split(raw.samples, 5, 8);
    std::vector<std::size_t> train_idx;
    for (std::size_t f = 1; f < folds.size(); ++f) train_idx.insert(train_idx.end(), folds[f].begin(), folds[f].end());
    std::sort(train_idx.begin(), train_idx.end());
    const NormStats stats = compute_stats(raw, train_idx);
    const MaskedBatch normalized = normalize(raw, stats).first;
    const MaskedBatch test = normalized.subset(folds[0]);

    TrainConfig c = TrainConfig::preset(Task::Classification);
    c.time_steps = 24;
    c.variant = Variant::VRinFull;
    const auto trained = train(normalized.subset(train_idx), stats, c);
    const auto m = evaluate_classification(trained.model, test);

    c.features = raw.features;
    Model untrained = initialize_model(c, stats);
    for (std::size_t i = 0; i < untrained.params.size(); ++i) untrained.params.value(i).fill(0.0);
    const auto u = evaluate_classification(untrained, test);

    const bool ok = m.auc >= 0.90 && m.auprc >= 0.60 && u.auc >= 0.4 && u.auc <= 0.6;
    return {ok, fmt("held-out AUC %.4f (need >= 0.90), AUPRC %.4f (need >= 0.60); untrained AUC %.4f (need 0.4-0.6)",
                    m.auc, m.auprc, u.auc)};
}

// Criteria 9 and 10 ---------------------------------------------------------

int cli(std::vector<std::string> args) {
    args.insert(args.begin(), "vrin");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

fs::path workdir() {
    const fs::path p = fs::temp_directory_path() / "vrin_acceptance";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

Outcome determinism() {
    const fs::path dir = workdir();
    const std::string data = (dir / "data").string();
    if (cli({"generate", "--out", data, "--patients", "60", "--features", "5", "--time-steps", "12", "--seed", "9"}) != 0)
        return {false, "generate failed"};
    const std::vector<std::string> common{"--data", data, "--direction", "bi", "--seed", "9", "--set", "epochs=5",
                                          "--set", "time_steps=12", "--set", "batch_size=16", "--removal", "0.1"};
    std::vector<std::string> reports;
    for (int r = 0; r < 2; ++r) {
        const std::string tag = std::to_string(r);
        std::vector<std::string> train{"train", "--task", "imputation", "--out", (dir / ("m" + tag)).string(), "--report",
                                       (dir / ("train" + tag + ".txt")).string()};
        train.insert(train.end(), common.begin(), common.end());
        if (cli(train) != 0) return {false, "train failed"};
        if (cli({"evaluate", "--checkpoint", (dir / ("m" + tag)).string(), "--data", data, "--removal", "0.1", "--folds",
                 "3", "--seed", "9", "--out", (dir / ("eval" + tag + ".txt")).string()}) != 0)
            return {false, "evaluate failed"};
        reports.push_back(io::read_text(dir / ("train" + tag + ".txt")) + io::read_text(dir / ("eval" + tag + ".txt")) +
                          io::read_text(dir / ("m" + tag)));
    }
    return {reports[0] == reports[1],
            std::string("two seeded train+evaluate runs: train report, evaluate report and checkpoint ") +
                (reports[0] == reports[1] ? "byte-identical" : "DIFFER")};
}

Outcome checkpoint_round_trip() {
    const MaskedBatch raw = random_batch(40, 10, 4, 0.4, 1010);
    const auto [hidden, record] = remove_values(raw, 0.1, RemovalScope::AllSplits, 10);
    const auto [normalized, stats] = normalize(hidden);
    TrainConfig c = TrainConfig::preset(Task::Classification);
    c.time_steps = 10;
    c.epochs = 5;
    c.batch_size = 16;
    c.direction = Direction::Bi;
    const Model model = train(normalized, stats, c).model;

    const fs::path file = workdir() / "model.ckpt";
    save_checkpoint(file, model);
    const Model loaded = load_checkpoint(file);
    const auto a = evaluate_classification(model, normalized);
    const auto b = evaluate_classification(loaded, normalized);
    const auto ia = evaluate_imputation(model, normalized, record);
    const auto ib = evaluate_imputation(loaded, normalized, record);
    const bool same_params = loaded.params == model.params && loaded.stats == model.stats && loaded.config == model.config;
    const bool same_metrics = a.auc == b.auc && a.auprc == b.auprc && ia.mae == ib.mae && ia.mre == ib.mre && ia.mse == ib.mse;
    std::string detail = std::string("parameters, stats and config ") + (same_params ? "identical" : "DIFFER");
    detail += fmt("; AUC %.6f / %.6f, AUPRC %.6f / %.6f", a.auc, b.auc, a.auprc, b.auprc);
    detail += fmt(", MAE %.6f / %.6f before / after reload", ia.mae, ib.mae);
    return {same_params && same_metrics, detail};
}

}  // namespace

int main(int argc, char** argv) {
    const bool strict = argc > 1 && std::string(argv[1]) == "--strict";
    run(1, "gradient oracle", gradient_oracle);
    run(2, "decay range", decay_range);
    run(3, "observed-value preservation", preservation);
    run(4, "zero-diagonal sensitivity", zero_diagonal);
    run(5, "metric oracles", metric_oracles);
    run(6, "ablation superset", ablation_superset);
    run(7, "end-to-end synthetic imputation", end_to_end_imputation);
    run(8, "end-to-end synthetic classification", end_to_end_classification);
    run(9, "determinism", determinism);
    run(10, "checkpoint round-trip", checkpoint_round_trip);
    std::printf("%d of 10 criteria passed\n", 10 - failures);
    return strict && failures > 0 ? 1 : 0;
}
