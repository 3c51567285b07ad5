#include "vrin/report.hpp"

#include <cstdio>

namespace vrin {

std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string format_report(const RunReport& report) {
    std::string out = "[run]\n";
    out += "task = " + std::string(to_string(report.config.task)) + "\n";
    out += "train_samples = " + std::to_string(report.train_samples) + "\n";
    out += "epochs_completed = " + std::to_string(report.epochs.size()) + "\n";
    out += std::string("early_stopped = ") + (report.early_stopped ? "true" : "false") + "\n";

    out += "\n[config]\n" + to_text(report.config);

    out += "\n[epochs]\n";
    out += "epoch l_total l_vae l_reg l_pred l_cons\n";
    for (const auto& e : report.epochs) {
        out += std::to_string(e.epoch) + " " + format_value(e.loss.total) + " " + format_value(e.loss.vae) + " " +
               format_value(e.loss.reg) + " " + format_value(e.loss.pred) + " " + format_value(e.loss.cons) + "\n";
    }

    out += "\n[metrics]\n";
    for (const auto& [name, value] : report.metrics) out += name + " = " + value + "\n";
    return out;
}

}  // namespace vrin
