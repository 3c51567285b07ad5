#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace vrin {

struct Event {
    double time = 0.0;  // hours since admission
    std::size_t variable = 0;
    double value = 0.0;
};

// Raw per-patient event stream.
struct IrregularSeries {
    std::string patient_id;
    std::vector<Event> events;
    int label = 0;
};

// Regular-grid representation of N patients: zero-filled values, mask,
// time gaps and grid timestamps. Per-cell arrays are sample-major,
// index = (n * steps + t) * features + d.
struct MaskedBatch {
    std::size_t samples = 0;
    std::size_t steps = 0;
    std::size_t features = 0;
    std::vector<double> values;
    std::vector<double> mask;
    std::vector<double> delta;
    std::vector<double> timestamps;  // N * T
    std::vector<int> labels;
    std::vector<std::string> patient_ids;

    MaskedBatch() = default;
    MaskedBatch(std::size_t n, std::size_t t, std::size_t d);

    std::size_t offset(std::size_t n, std::size_t t, std::size_t d) const { return (n * steps + t) * features + d; }
    double value(std::size_t n, std::size_t t, std::size_t d) const { return values[offset(n, t, d)]; }
    bool observed(std::size_t n, std::size_t t, std::size_t d) const { return mask[offset(n, t, d)] != 0.0; }
    std::size_t observed_count() const;

    // Copy of the listed samples, in the given order.
    MaskedBatch subset(std::span<const std::size_t> indices) const;

    bool operator==(const MaskedBatch&) const = default;
};

struct GridSample {
    std::vector<double> values;  // T * D
    std::vector<double> mask;    // T * D
    std::vector<double> timestamps;
    std::size_t dropped = 0;  // events at or past the horizon
};

// Averages events into fixed windows [t*w, (t+1)*w). Events past
// steps * window_hours are dropped and counted.
GridSample bin_to_grid(const IrregularSeries& series, std::size_t features, double window_hours, std::size_t steps);

// Time gaps for one sample. `mask` is T x D, `timestamps` has T entries and
// must be strictly increasing.
std::vector<double> build_delta(std::span<const double> mask, std::span<const double> timestamps,
                                std::size_t features);

// Recomputes delta for every sample from its mask and timestamps.
void rebuild_delta(MaskedBatch& batch);

// Bins every series and builds the time gaps. Patients without a single
// event are rejected.
MaskedBatch assemble(const std::vector<IrregularSeries>& series, std::size_t features, double window_hours,
                     std::size_t steps, std::size_t* dropped_events = nullptr);

// Per-variable mean and population standard deviation over observed entries.
struct NormStats {
    std::vector<double> mean;
    std::vector<double> stddev;

    double normalize(double v, std::size_t d) const;
    double denormalize(double v, std::size_t d) const;
    bool operator==(const NormStats&) const = default;
};

NormStats compute_stats(const MaskedBatch& batch, std::span<const std::size_t> samples = {});

// Z-scores observed entries; missing entries stay exactly zero. Computes
// stats from the whole batch when none are supplied.
std::pair<MaskedBatch, NormStats> normalize(const MaskedBatch& batch, std::optional<NormStats> stats = std::nullopt);
MaskedBatch denormalize(const MaskedBatch& batch, const NormStats& stats);

enum class RemovalScope { TrainOnly, AllSplits };

struct RemovedEntry {
    std::size_t sample = 0;
    std::size_t step = 0;
    std::size_t feature = 0;
    double value = 0.0;
};

struct RemovalRecord {
    std::vector<RemovedEntry> entries;
    bool empty() const { return entries.empty(); }
    std::size_t size() const { return entries.size(); }
};

// Hides floor(fraction * eligible observed) entries chosen uniformly and
// rebuilds delta. With TrainOnly scope only `train_samples` are eligible.
std::pair<MaskedBatch, RemovalRecord> remove_values(const MaskedBatch& batch, double fraction, RemovalScope scope,
                                                    std::uint64_t seed,
                                                    std::span<const std::size_t> train_samples = {});

// Inverse of remove_values.
MaskedBatch restore(const MaskedBatch& batch, const RemovalRecord& record);

struct SyntheticOptions {
    std::size_t patients = 100;
    std::size_t steps = 48;
    std::size_t features = 8;
    double missing_rate = 0.5;
    double positive_rate = 0.15;
    std::size_t latent_dim = 3;
    double ar_coefficient = 0.9;
    double noise_std = 0.1;
    double window_hours = 1.0;
    std::uint64_t seed = 0;
};

// Latent AR(1) trajectories mixed into correlated channels, observed at
// random. The label thresholds a fixed linear functional of the latent
// trajectory at the quantile matching `positive_rate`.
std::vector<IrregularSeries> generate_synthetic(const SyntheticOptions& options);

// Random partition of 0..n-1 into k folds whose sizes differ by at most one.
std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, std::size_t k, std::uint64_t seed);

}  // namespace vrin
