#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vrin {

enum class Task { Classification, Imputation };
enum class Direction { Uni, Bi };
// VRin drops the uncertainty gate (upsilon fixed at 1); VRinFull keeps it.
enum class Variant { VRin, VRinFull };
// Which entries the decoder likelihood scores.
enum class ReconLikelihood { ObservedOnly, ZeroFilled };
// Default sizes and rates for the two reference cohort styles.
enum class Profile { PhysioNet, Mimic };

std::string_view to_string(Task v);
std::string_view to_string(Direction v);
std::string_view to_string(Variant v);
std::string_view to_string(ReconLikelihood v);
std::string_view to_string(Profile v);

Task parse_task(std::string_view s);
Direction parse_direction(std::string_view s);
Variant parse_variant(std::string_view s);

// Raised for config schema violations; carries every offending key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string message, std::vector<std::string> keys);
    const std::vector<std::string>& keys() const { return keys_; }

private:
    std::vector<std::string> keys_;
};

struct TrainConfig {
    Task task = Task::Classification;
    Profile profile = Profile::PhysioNet;

    double alpha = 0.75;
    double beta = 0.25;
    double xi = 0.1;
    double lambda1 = 1e-5;
    double learning_rate = 0.005;
    double weight_decay = 1e-5;

    std::size_t epochs = 100;
    std::size_t batch_size = 64;
    std::size_t hidden = 64;
    std::size_t latent = 10;
    std::vector<std::size_t> vae_hidden{64, 24};
    double dropout = 0.1;

    Direction direction = Direction::Uni;
    Variant variant = Variant::VRinFull;
    ReconLikelihood recon_likelihood = ReconLikelihood::ObservedOnly;
    double log_var_clamp = 10.0;
    bool batch_norm = false;
    std::size_t early_stopping_patience = 0;  // 0 disables
    int precision = 64;

    std::uint64_t seed = 0;
    std::size_t time_steps = 48;
    std::size_t features = 0;
    double window_hours = 1.0;

    // Task defaults: learning rate and dropout differ between the
    // classification and imputation regimes, sizes between profiles.
    static TrainConfig preset(Task task, Profile profile = Profile::PhysioNet);

    // Throws ConfigError naming every invalid key.
    void validate() const;

    bool operator==(const TrainConfig&) const = default;
};

// Flat `key = value` text, one key per line, `#` comments.
std::string to_text(const TrainConfig& config);

// Keys absent from `text` keep their value from `base`. Unknown keys and
// malformed values are errors.
TrainConfig parse_config(std::string_view text, const TrainConfig& base);
TrainConfig parse_config(std::string_view text);

// Applies a single key; used by both the file parser and CLI overrides.
void set_config_value(TrainConfig& config, std::string_view key, std::string_view value);

}  // namespace vrin
