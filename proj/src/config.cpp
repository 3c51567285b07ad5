#include "vrin/config.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <map>
#include <sstream>

namespace vrin {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view key, std::string_view s) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ConfigError("invalid number for '" + std::string(key) + "': '" + std::string(s) + "'",
                          {std::string(key)});
    }
    return v;
}

std::uint64_t parse_uint(std::string_view key, std::string_view s) {
    std::uint64_t v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ConfigError("invalid integer for '" + std::string(key) + "': '" + std::string(s) + "'",
                          {std::string(key)});
    }
    return v;
}

bool parse_bool(std::string_view key, std::string_view s) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw ConfigError("invalid boolean for '" + std::string(key) + "': '" + std::string(s) + "'", {std::string(key)});
}

std::vector<std::size_t> parse_list(std::string_view key, std::string_view s) {
    std::vector<std::size_t> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto comma = s.find(',', start);
        const auto piece = trim(s.substr(start, comma == std::string_view::npos ? s.size() - start : comma - start));
        out.push_back(static_cast<std::size_t>(parse_uint(key, piece)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

using Setter = std::function<void(TrainConfig&, std::string_view, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table = {
        {"task", [](TrainConfig& c, auto, auto v) { c.task = parse_task(v); }},
        {"profile",
         [](TrainConfig& c, auto k, auto v) {
             if (v == "physionet") {
                 c.profile = Profile::PhysioNet;
             } else if (v == "mimic") {
                 c.profile = Profile::Mimic;
             } else {
                 throw ConfigError("profile must be physionet or mimic", {std::string(k)});
             }
         }},
        {"alpha", [](TrainConfig& c, auto k, auto v) { c.alpha = parse_double(k, v); }},
        {"beta", [](TrainConfig& c, auto k, auto v) { c.beta = parse_double(k, v); }},
        {"xi", [](TrainConfig& c, auto k, auto v) { c.xi = parse_double(k, v); }},
        {"lambda1", [](TrainConfig& c, auto k, auto v) { c.lambda1 = parse_double(k, v); }},
        {"learning_rate", [](TrainConfig& c, auto k, auto v) { c.learning_rate = parse_double(k, v); }},
        {"weight_decay", [](TrainConfig& c, auto k, auto v) { c.weight_decay = parse_double(k, v); }},
        {"epochs", [](TrainConfig& c, auto k, auto v) { c.epochs = parse_uint(k, v); }},
        {"batch_size", [](TrainConfig& c, auto k, auto v) { c.batch_size = parse_uint(k, v); }},
        {"hidden", [](TrainConfig& c, auto k, auto v) { c.hidden = parse_uint(k, v); }},
        {"latent", [](TrainConfig& c, auto k, auto v) { c.latent = parse_uint(k, v); }},
        {"vae_hidden", [](TrainConfig& c, auto k, auto v) { c.vae_hidden = parse_list(k, v); }},
        {"dropout", [](TrainConfig& c, auto k, auto v) { c.dropout = parse_double(k, v); }},
        {"direction", [](TrainConfig& c, auto, auto v) { c.direction = parse_direction(v); }},
        {"variant", [](TrainConfig& c, auto, auto v) { c.variant = parse_variant(v); }},
        {"recon_likelihood",
         [](TrainConfig& c, auto k, auto v) {
             if (v == "observed_only") {
                 c.recon_likelihood = ReconLikelihood::ObservedOnly;
             } else if (v == "zero_filled") {
                 c.recon_likelihood = ReconLikelihood::ZeroFilled;
             } else {
                 throw ConfigError("recon_likelihood must be observed_only or zero_filled", {std::string(k)});
             }
         }},
        {"log_var_clamp", [](TrainConfig& c, auto k, auto v) { c.log_var_clamp = parse_double(k, v); }},
        {"batch_norm", [](TrainConfig& c, auto k, auto v) { c.batch_norm = parse_bool(k, v); }},
        {"early_stopping_patience",
         [](TrainConfig& c, auto k, auto v) { c.early_stopping_patience = parse_uint(k, v); }},
        {"precision", [](TrainConfig& c, auto k, auto v) { c.precision = static_cast<int>(parse_uint(k, v)); }},
        {"seed", [](TrainConfig& c, auto k, auto v) { c.seed = parse_uint(k, v); }},
        {"time_steps", [](TrainConfig& c, auto k, auto v) { c.time_steps = parse_uint(k, v); }},
        {"features", [](TrainConfig& c, auto k, auto v) { c.features = parse_uint(k, v); }},
        {"window_hours", [](TrainConfig& c, auto k, auto v) { c.window_hours = parse_double(k, v); }},
    };
    return table;
}

}  // namespace

std::string_view to_string(Task v) { return v == Task::Classification ? "classification" : "imputation"; }
std::string_view to_string(Direction v) { return v == Direction::Uni ? "uni" : "bi"; }
std::string_view to_string(Variant v) { return v == Variant::VRin ? "v-rin" : "v-rin-full"; }
std::string_view to_string(ReconLikelihood v) {
    return v == ReconLikelihood::ObservedOnly ? "observed_only" : "zero_filled";
}
std::string_view to_string(Profile v) { return v == Profile::PhysioNet ? "physionet" : "mimic"; }

Task parse_task(std::string_view s) {
    if (s == "classification") return Task::Classification;
    if (s == "imputation") return Task::Imputation;
    throw ConfigError("task must be classification or imputation, got '" + std::string(s) + "'", {"task"});
}

Direction parse_direction(std::string_view s) {
    if (s == "uni") return Direction::Uni;
    if (s == "bi") return Direction::Bi;
    throw ConfigError("direction must be uni or bi, got '" + std::string(s) + "'", {"direction"});
}

Variant parse_variant(std::string_view s) {
    if (s == "v-rin" || s == "v_rin") return Variant::VRin;
    if (s == "v-rin-full" || s == "v_rin_full") return Variant::VRinFull;
    throw ConfigError("variant must be v-rin or v-rin-full, got '" + std::string(s) + "'", {"variant"});
}

ConfigError::ConfigError(std::string message, std::vector<std::string> keys)
    : std::runtime_error(std::move(message)), keys_(std::move(keys)) {}

TrainConfig TrainConfig::preset(Task task, Profile profile) {
    TrainConfig c;
    c.task = task;
    c.profile = profile;
    if (profile == Profile::PhysioNet) {
        c.vae_hidden = {64, 24};
        c.latent = 10;
        c.time_steps = 48;
        c.window_hours = 1.0;
        c.dropout = task == Task::Classification ? 0.1 : 0.3;
        c.learning_rate = task == Task::Classification ? 0.005 : 0.0005;
    } else {
        c.vae_hidden = {128, 32};
        c.latent = 16;
        c.time_steps = 24;
        c.window_hours = 2.0;
        c.dropout = 0.3;
        c.learning_rate = task == Task::Classification ? 0.005 : 0.0003;
    }
    return c;
}

void TrainConfig::validate() const {
    std::vector<std::string> bad;
    auto check = [&](bool ok, const char* key) {
        if (!ok) bad.emplace_back(key);
    };
    check(alpha >= 0.1 && alpha <= 1.0, "alpha");
    check(beta >= 0.1 && beta <= 1.0, "beta");
    check(xi >= 0.0, "xi");
    check(lambda1 >= 0.0, "lambda1");
    check(learning_rate > 0.0, "learning_rate");
    check(weight_decay >= 0.0, "weight_decay");
    check(epochs > 0, "epochs");
    check(batch_size > 0, "batch_size");
    check(hidden > 0, "hidden");
    check(latent > 0, "latent");
    check(std::all_of(vae_hidden.begin(), vae_hidden.end(), [](std::size_t h) { return h > 0; }), "vae_hidden");
    check(dropout >= 0.0 && dropout < 1.0, "dropout");
    check(log_var_clamp > 0.0, "log_var_clamp");
    check(!batch_norm, "batch_norm");
    check(precision == 64, "precision");
    check(time_steps > 0, "time_steps");
    check(window_hours > 0.0, "window_hours");
    if (!bad.empty()) {
        std::string msg = "invalid config keys:";
        for (const auto& k : bad) msg += " " + k;
        throw ConfigError(msg, bad);
    }
}

std::string to_text(const TrainConfig& c) {
    std::ostringstream os;
    auto list = [](const std::vector<std::size_t>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
        return s;
    };
    os << "task = " << to_string(c.task) << '\n'
       << "profile = " << to_string(c.profile) << '\n'
       << "alpha = " << format_double(c.alpha) << '\n'
       << "beta = " << format_double(c.beta) << '\n'
       << "xi = " << format_double(c.xi) << '\n'
       << "lambda1 = " << format_double(c.lambda1) << '\n'
       << "learning_rate = " << format_double(c.learning_rate) << '\n'
       << "weight_decay = " << format_double(c.weight_decay) << '\n'
       << "epochs = " << c.epochs << '\n'
       << "batch_size = " << c.batch_size << '\n'
       << "hidden = " << c.hidden << '\n'
       << "latent = " << c.latent << '\n'
       << "vae_hidden = " << list(c.vae_hidden) << '\n'
       << "dropout = " << format_double(c.dropout) << '\n'
       << "direction = " << to_string(c.direction) << '\n'
       << "variant = " << to_string(c.variant) << '\n'
       << "recon_likelihood = " << to_string(c.recon_likelihood) << '\n'
       << "log_var_clamp = " << format_double(c.log_var_clamp) << '\n'
       << "batch_norm = " << (c.batch_norm ? "true" : "false") << '\n'
       << "early_stopping_patience = " << c.early_stopping_patience << '\n'
       << "precision = " << c.precision << '\n'
       << "seed = " << c.seed << '\n'
       << "time_steps = " << c.time_steps << '\n'
       << "features = " << c.features << '\n'
       << "window_hours = " << format_double(c.window_hours) << '\n';
    return os.str();
}

void set_config_value(TrainConfig& config, std::string_view key, std::string_view value) {
    const auto& table = setters();
    auto it = table.find(key);
    if (it == table.end()) throw ConfigError("unknown config key '" + std::string(key) + "'", {std::string(key)});
    it->second(config, key, value);
}

TrainConfig parse_config(std::string_view text, const TrainConfig& base) {
    TrainConfig config = base;
    std::vector<std::string> bad;
    std::string first_message;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto content = trim(line);
        if (content.empty()) continue;
        const auto eq = content.find('=');
        if (eq == std::string::npos) {
            bad.push_back("line " + std::to_string(line_no));
            if (first_message.empty()) first_message = "expected 'key = value' on line " + std::to_string(line_no);
            continue;
        }
        const auto key = trim(std::string_view(content).substr(0, eq));
        const auto value = trim(std::string_view(content).substr(eq + 1));
        try {
            set_config_value(config, key, value);
        } catch (const ConfigError& e) {
            bad.insert(bad.end(), e.keys().begin(), e.keys().end());
            if (first_message.empty()) first_message = e.what();
        }
    }
    if (!bad.empty()) {
        std::string msg = "config errors (" + first_message + "); offending keys:";
        for (const auto& k : bad) msg += " " + k;
        throw ConfigError(msg, bad);
    }
    return config;
}

TrainConfig parse_config(std::string_view text) {
    // Task and profile pick the preset the remaining keys override.
    Task task = Task::Classification;
    Profile profile = Profile::PhysioNet;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const auto key = trim(std::string_view(line).substr(0, eq));
        const auto value = trim(std::string_view(line).substr(eq + 1));
        try {
            if (key == "task") task = parse_task(value);
            if (key == "profile" && value == "mimic") profile = Profile::Mimic;
        } catch (const ConfigError&) {
            // Reported with full context by the main pass.
        }
    }
    return parse_config(text, TrainConfig::preset(task, profile));
}

}  // namespace vrin
