#include "vrin/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <numeric>
#include <optional>

#include "vrin/baselines.hpp"
#include "vrin/checkpoint.hpp"
#include "vrin/config.hpp"
#include "vrin/errors.hpp"
#include "vrin/io.hpp"
#include "vrin/report.hpp"
#include "vrin/rng.hpp"
#include "vrin/trainer.hpp"

namespace vrin {

namespace {

struct GenerateArgs {
    std::string out;
    SyntheticOptions options;
};

struct TrainArgs {
    std::string data, config, out, report;
    std::optional<std::string> task, direction, variant;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> overrides;
    double removal = 0.0;
    std::size_t folds = 1;
};

struct EvaluateArgs {
    std::string checkpoint, data, out;
    std::optional<std::string> task;
    double removal = 0.0;
    std::size_t folds = 1;
    std::uint64_t seed = 0;
};

struct ImputeArgs {
    std::string checkpoint, data, out, predictions;
};

struct Dataset {
    io::LoadedDataset loaded;
    MaskedBatch raw;
};

Dataset load_dataset(const std::string& dir, const TrainConfig& config, std::ostream& err) {
    Dataset d;
    d.loaded = io::read_dataset(dir);
    if (d.loaded.skipped_patients > 0) {
        err << "note: skipped " << d.loaded.skipped_patients << " patient(s) without observations\n";
    }
    if (config.features != 0 && config.features != d.loaded.vocabulary.size()) {
        throw MismatchError("model expects " + std::to_string(config.features) + " variables, data has " +
                            std::to_string(d.loaded.vocabulary.size()));
    }
    std::size_t dropped = 0;
    d.raw = assemble(d.loaded.series, d.loaded.vocabulary.size(), config.window_hours, config.time_steps, &dropped);
    if (dropped > 0) err << "note: " << dropped << " event(s) fell outside the observation window\n";
    return d;
}

std::string fixed4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

// Metric lines: "name mean ± std" across folds, or "name value" for one.
void add_metrics(RunReport& report, const std::vector<std::map<std::string, double>>& rows) {
    for (const auto& [name, _] : rows.front()) {
        std::vector<double> values;
        for (const auto& r : rows) values.push_back(r.at(name));
        report.metrics.emplace_back(name, rows.size() > 1 ? format_summary(summarize(values)) : fixed4(values.front()));
    }
}

void print_metrics(const RunReport& report, std::ostream& out) {
    for (const auto& [name, value] : report.metrics) out << name << ' ' << value << '\n';
}

std::map<std::string, double> score(const Model& model, const MaskedBatch& raw_eval, const MaskedBatch& normalized,
                                    const RemovalRecord& record) {
    std::map<std::string, double> row;
    if (model.config.task == Task::Classification) {
        const auto m = evaluate_classification(model, normalized);
        row["auc"] = m.auc;
        row["auprc"] = m.auprc;
    } else {
        const auto m = evaluate_imputation(model, normalized, record);
        row["mae"] = m.mae;
        row["mre"] = m.mre;
        row["mse"] = m.mse;
        const auto filled = fill(raw_eval, FillMethod::Mean, model.stats);
        const auto b = imputation_metrics(
            record, [&](const RemovedEntry& e) { return filled[raw_eval.offset(e.sample, e.step, e.feature)]; });
        row["mean_fill_mae"] = b.mae;
        row["mean_fill_mre"] = b.mre;
        row["mean_fill_mse"] = b.mse;
    }
    return row;
}

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
    const auto series = generate_synthetic(a.options);
    io::write_dataset(a.out, series, io::Vocabulary::numbered(a.options.features));
    out << "wrote " << series.size() << " patients to " << a.out << '\n';
    return kExitOk;
}

TrainConfig resolve_config(const TrainArgs& a) {
    TrainConfig config;
    if (!a.config.empty()) {
        config = parse_config(io::read_text(a.config));
        if (a.task) {
            // A task flag that differs from the file switches to that task's preset
            // while keeping every key the file sets explicitly.
            const Task task = parse_task(*a.task);
            if (task != config.task) {
                config = parse_config(io::read_text(a.config), TrainConfig::preset(task, config.profile));
                config.task = task;
            }
        }
    } else {
        config = TrainConfig::preset(a.task ? parse_task(*a.task) : Task::Classification);
    }
    if (a.direction) set_config_value(config, "direction", *a.direction);
    if (a.variant) set_config_value(config, "variant", *a.variant);
    if (a.seed) config.seed = *a.seed;
    std::vector<std::string> bad;
    for (const auto& o : a.overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) {
            bad.push_back(o);
            continue;
        }
        set_config_value(config, o.substr(0, eq), o.substr(eq + 1));
    }
    if (!bad.empty()) throw ConfigError("--set expects key=value", bad);
    return config;
}

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
    TrainConfig config = resolve_config(a);
    config.validate();
    const Dataset d = load_dataset(a.data, config, err);
    config.features = d.raw.features;

    RunReport report;
    if (a.folds > 1) {
        const auto cv = crossvalidate(d.raw, config, CrossValidationOptions{a.folds, a.removal, config.seed});
        add_metrics(report, cv.per_fold);
    }

    // The saved model is always fit on every patient.
    MaskedBatch data = d.raw;
    RemovalRecord record;
    if (a.removal > 0.0) {
        std::tie(data, record) = remove_values(d.raw, a.removal, RemovalScope::AllSplits, derive_seed(config.seed, 11));
    }
    const auto [normalized, stats] = normalize(data);
    TrainResult trained = train(normalized, stats, config);
    trained.report.metrics = report.metrics;
    if (a.folds <= 1 && (config.task == Task::Classification || !record.empty())) {
        for (auto& [name, value] : score(trained.model, data, normalized, record)) {
            trained.report.metrics.emplace_back("train_" + name, fixed4(value));
        }
    }

    save_checkpoint(a.out, trained.model);
    const std::string report_path = a.report.empty() ? a.out + ".report.txt" : a.report;
    io::write_text(report_path, format_report(trained.report));
    print_metrics(trained.report, out);
    out << "checkpoint " << a.out << "\nreport " << report_path << '\n';
    return kExitOk;
}

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
    Model model = load_checkpoint(a.checkpoint);
    if (a.task) model.config.task = parse_task(*a.task);
    if (model.config.task == Task::Imputation && !(a.removal > 0.0)) {
        throw ConfigError("imputation evaluation needs --removal > 0", {"removal"});
    }
    const Dataset d = load_dataset(a.data, model.config, err);
    MaskedBatch data = d.raw;
    RemovalRecord record;
    if (a.removal > 0.0) {
        std::tie(data, record) = remove_values(d.raw, a.removal, RemovalScope::AllSplits, derive_seed(a.seed, 11));
    }
    const MaskedBatch normalized = normalize(data, model.stats).first;

    std::vector<std::vector<std::size_t>> parts;
    if (a.folds > 1) {
        parts = kfold_split(data.samples, a.folds, a.seed);
        for (auto& p : parts) std::sort(p.begin(), p.end());
    } else {
        parts.emplace_back(data.samples);
        std::iota(parts.back().begin(), parts.back().end(), std::size_t{0});
    }
    std::vector<std::map<std::string, double>> rows;
    for (const auto& idx : parts) {
        rows.push_back(score(model, data.subset(idx), normalized.subset(idx), restrict_record(record, idx)));
    }

    RunReport report;
    report.config = model.config;
    add_metrics(report, rows);
    print_metrics(report, out);
    if (!a.out.empty()) {
        std::string text = "[evaluate]\n";
        text += "task = " + std::string(to_string(model.config.task)) + "\n";
        text += "patients = " + std::to_string(data.samples) + "\n";
        text += "folds = " + std::to_string(parts.size()) + "\n";
        text += "removal = " + io::format_number(a.removal) + "\n";
        text += "seed = " + std::to_string(a.seed) + "\n";
        text += "\n[metrics]\n";
        for (const auto& [name, value] : report.metrics) text += name + " = " + value + "\n";
        io::write_text(a.out, text);
    }
    return kExitOk;
}

int cmd_impute(const ImputeArgs& a, std::ostream& out, std::ostream& err) {
    const Model model = load_checkpoint(a.checkpoint);
    const Dataset d = load_dataset(a.data, model.config, err);
    const MaskedBatch& raw = d.raw;
    const MaskedBatch normalized = normalize(raw, model.stats).first;
    const Inference inf = infer(model, normalized);

    std::string rows = "patient_id,time_index,timestamp,variable,value,source,uncertainty\n";
    for (std::size_t n = 0; n < raw.samples; ++n) {
        for (std::size_t t = 0; t < raw.steps; ++t) {
            const std::string prefix = raw.patient_ids[n] + "," + std::to_string(t) + "," +
                                       io::format_number(raw.timestamps[n * raw.steps + t]) + ",";
            for (std::size_t dim = 0; dim < raw.features; ++dim) {
                const auto o = raw.offset(n, t, dim);
                rows += prefix + d.loaded.vocabulary.name(dim) + ",";
                if (raw.mask[o] != 0.0) {
                    rows += io::format_number(raw.values[o]) + ",observed,0\n";
                } else {
                    const double scale = model.stats.stddev[dim] > 0.0 ? model.stats.stddev[dim] : 1.0;
                    rows += io::format_number(model.stats.denormalize(inf.completed[o], dim)) + ",imputed," +
                            io::format_number(inf.uncertainty[o] * scale) + "\n";
                }
            }
        }
    }
    io::write_text(a.out, rows);

    std::string preds = "patient_id,y_hat\n";
    for (std::size_t n = 0; n < raw.samples; ++n) {
        preds += raw.patient_ids[n] + "," + io::format_number(inf.probability[n]) + "\n";
    }
    std::string pred_path = a.predictions;
    if (pred_path.empty()) {
        std::filesystem::path p(a.out);
        pred_path = (p.parent_path() / (p.stem().string() + "_predictions.csv")).string();
    }
    io::write_text(pred_path, preds);
    out << "wrote " << raw.samples * raw.steps * raw.features << " rows to " << a.out << "\npredictions "
        << pred_path << '\n';
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Uncertainty-aware imputation and outcome prediction for irregular clinical time series"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* g = app.add_subcommand("generate", "Write a synthetic dataset");
    g->add_option("--out", gen.out, "Output directory")->required();
    g->add_option("--patients", gen.options.patients)->check(CLI::PositiveNumber);
    g->add_option("--time-steps", gen.options.steps)->check(CLI::PositiveNumber);
    g->add_option("--features", gen.options.features)->check(CLI::PositiveNumber);
    g->add_option("--missing-rate", gen.options.missing_rate)->check(CLI::Range(0.0, 1.0));
    g->add_option("--positive-rate", gen.options.positive_rate)->check(CLI::Range(0.0, 1.0));
    g->add_option("--window-hours", gen.options.window_hours)->check(CLI::PositiveNumber);
    g->add_option("--seed", gen.options.seed);

    TrainArgs tr;
    auto* t = app.add_subcommand("train", "Fit a model and write a checkpoint and report");
    t->add_option("--data", tr.data, "Dataset directory")->required();
    t->add_option("--config", tr.config, "Config file (key = value)");
    t->add_option("--out", tr.out, "Checkpoint path")->required();
    t->add_option("--report", tr.report, "Report path (default: <out>.report.txt)");
    t->add_option("--task", tr.task)->check(CLI::IsMember({"classification", "imputation"}));
    t->add_option("--direction", tr.direction)->check(CLI::IsMember({"uni", "bi"}));
    t->add_option("--variant", tr.variant)->check(CLI::IsMember({"v-rin", "v-rin-full", "v_rin", "v_rin_full"}));
    t->add_option("--seed", tr.seed);
    t->add_option("--set", tr.overrides, "Config override key=value (repeatable)");
    t->add_option("--removal", tr.removal, "Fraction of observed values hidden")->check(CLI::Range(0.0, 0.99));
    t->add_option("--folds", tr.folds, "Cross-validation folds (1 = none)")->check(CLI::PositiveNumber);

    EvaluateArgs ev;
    auto* e = app.add_subcommand("evaluate", "Score a checkpoint on a dataset");
    e->add_option("--checkpoint", ev.checkpoint)->required();
    e->add_option("--data", ev.data)->required();
    e->add_option("--task", ev.task)->check(CLI::IsMember({"classification", "imputation"}));
    e->add_option("--removal", ev.removal)->check(CLI::Range(0.0, 0.99));
    e->add_option("--folds", ev.folds)->check(CLI::PositiveNumber);
    e->add_option("--seed", ev.seed);
    e->add_option("--out", ev.out, "Metrics file");

    ImputeArgs im;
    auto* i = app.add_subcommand("impute", "Write completed series and predictions");
    i->add_option("--checkpoint", im.checkpoint)->required();
    i->add_option("--data", im.data)->required();
    i->add_option("--out", im.out, "Completed-series CSV")->required();
    i->add_option("--predictions", im.predictions, "Per-patient prediction CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& ex) {
        err << "error: " << ex.what() << '\n';
        return kExitUsage;
    }

    try {
        if (g->parsed()) return cmd_generate(gen, out);
        if (t->parsed()) return cmd_train(tr, out, err);
        if (e->parsed()) return cmd_evaluate(ev, out, err);
        if (i->parsed()) return cmd_impute(im, out, err);
    } catch (const ConfigError& ex) {
        err << "config error: " << ex.what();
        if (!ex.keys().empty()) {
            err << " [keys:";
            for (const auto& k : ex.keys()) err << ' ' << k;
            err << ']';
        }
        err << '\n';
        return kExitUsage;
    } catch (const MismatchError& ex) {
        err << "mismatch: " << ex.what() << '\n';
        return kExitMismatch;
    } catch (const NumericError& ex) {
        err << "numeric failure: " << ex.what() << '\n';
        return kExitNumeric;
    } catch (const DataError& ex) {
        err << "error: " << ex.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& ex) {
        err << "error: " << ex.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace vrin
