#include "vrin/data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "vrin/errors.hpp"

namespace vrin {

MaskedBatch::MaskedBatch(std::size_t n, std::size_t t, std::size_t d)
    : samples(n),
      steps(t),
      features(d),
      values(n * t * d, 0.0),
      mask(n * t * d, 0.0),
      delta(n * t * d, 1.0),
      timestamps(n * t, 0.0),
      labels(n, 0),
      patient_ids(n) {}

std::size_t MaskedBatch::observed_count() const {
    return static_cast<std::size_t>(std::count_if(mask.begin(), mask.end(), [](double m) { return m != 0.0; }));
}

MaskedBatch MaskedBatch::subset(std::span<const std::size_t> indices) const {
    MaskedBatch out(indices.size(), steps, features);
    const std::size_t cell = steps * features;
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const std::size_t n = indices[i];
        if (n >= samples) throw std::out_of_range("subset: sample index out of range");
        std::copy_n(values.begin() + n * cell, cell, out.values.begin() + i * cell);
        std::copy_n(mask.begin() + n * cell, cell, out.mask.begin() + i * cell);
        std::copy_n(delta.begin() + n * cell, cell, out.delta.begin() + i * cell);
        std::copy_n(timestamps.begin() + n * steps, steps, out.timestamps.begin() + i * steps);
        out.labels[i] = labels[n];
        out.patient_ids[i] = patient_ids[n];
    }
    return out;
}

GridSample bin_to_grid(const IrregularSeries& series, std::size_t features, double window_hours, std::size_t steps) {
    if (!(window_hours > 0.0)) throw std::invalid_argument("bin_to_grid: window_hours must be positive");
    GridSample grid;
    grid.values.assign(steps * features, 0.0);
    grid.mask.assign(steps * features, 0.0);
    grid.timestamps.resize(steps);
    for (std::size_t t = 0; t < steps; ++t) grid.timestamps[t] = static_cast<double>(t) * window_hours;

    std::vector<std::size_t> counts(steps * features, 0);
    const double horizon = static_cast<double>(steps) * window_hours;
    for (const auto& e : series.events) {
        if (!(e.time >= 0.0)) {
            throw DataError("patient '" + series.patient_id + "': negative timestamp " + std::to_string(e.time));
        }
        if (e.variable >= features) {
            throw DataError("patient '" + series.patient_id + "': variable index " + std::to_string(e.variable) +
                            " out of range");
        }
        if (e.time >= horizon) {
            ++grid.dropped;
            continue;
        }
        const auto t = std::min(static_cast<std::size_t>(e.time / window_hours), steps - 1);
        const std::size_t cell = t * features + e.variable;
        grid.values[cell] += e.value;
        ++counts[cell];
    }
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] > 0) {
            grid.values[c] /= static_cast<double>(counts[c]);
            grid.mask[c] = 1.0;
        }
    }
    return grid;
}

std::vector<double> build_delta(std::span<const double> mask, std::span<const double> timestamps,
                                std::size_t features) {
    const std::size_t steps = timestamps.size();
    if (mask.size() != steps * features) throw ShapeError("build_delta: mask size does not match T x D");
    for (std::size_t t = 1; t < steps; ++t) {
        if (!(timestamps[t] > timestamps[t - 1])) {
            throw DataError("build_delta: timestamps must be strictly increasing (t=" + std::to_string(t) + ")");
        }
    }
    std::vector<double> delta(steps * features, 1.0);
    for (std::size_t t = 1; t < steps; ++t) {
        const double gap = timestamps[t] - timestamps[t - 1];
        for (std::size_t d = 0; d < features; ++d) {
            const std::size_t prev = (t - 1) * features + d;
            delta[t * features + d] = mask[prev] != 0.0 ? gap : gap + delta[prev];
        }
    }
    return delta;
}

void rebuild_delta(MaskedBatch& batch) {
    const std::size_t cell = batch.steps * batch.features;
    for (std::size_t n = 0; n < batch.samples; ++n) {
        auto d = build_delta(std::span(batch.mask).subspan(n * cell, cell),
                             std::span(batch.timestamps).subspan(n * batch.steps, batch.steps), batch.features);
        std::copy(d.begin(), d.end(), batch.delta.begin() + n * cell);
    }
}

MaskedBatch assemble(const std::vector<IrregularSeries>& series, std::size_t features, double window_hours,
                     std::size_t steps, std::size_t* dropped_events) {
    MaskedBatch batch(series.size(), steps, features);
    const std::size_t cell = steps * features;
    std::size_t dropped = 0;
    for (std::size_t n = 0; n < series.size(); ++n) {
        if (series[n].events.empty()) {
            throw DataError("patient '" + series[n].patient_id + "' has no observations");
        }
        auto grid = bin_to_grid(series[n], features, window_hours, steps);
        dropped += grid.dropped;
        std::copy(grid.values.begin(), grid.values.end(), batch.values.begin() + n * cell);
        std::copy(grid.mask.begin(), grid.mask.end(), batch.mask.begin() + n * cell);
        std::copy(grid.timestamps.begin(), grid.timestamps.end(), batch.timestamps.begin() + n * steps);
        batch.labels[n] = series[n].label;
        batch.patient_ids[n] = series[n].patient_id;
    }
    rebuild_delta(batch);
    if (dropped_events) *dropped_events = dropped;
    return batch;
}

double NormStats::normalize(double v, std::size_t d) const {
    const double centered = v - mean[d];
    return stddev[d] > 0.0 ? centered / stddev[d] : centered;
}

double NormStats::denormalize(double v, std::size_t d) const {
    return stddev[d] > 0.0 ? v * stddev[d] + mean[d] : v + mean[d];
}

NormStats compute_stats(const MaskedBatch& batch, std::span<const std::size_t> samples) {
    std::vector<std::size_t> all;
    if (samples.empty()) {
        all.resize(batch.samples);
        std::iota(all.begin(), all.end(), std::size_t{0});
        samples = all;
    }
    const std::size_t D = batch.features;
    std::vector<double> sum(D, 0.0), count(D, 0.0);
    for (auto n : samples) {
        for (std::size_t t = 0; t < batch.steps; ++t) {
            for (std::size_t d = 0; d < D; ++d) {
                const auto o = batch.offset(n, t, d);
                if (batch.mask[o] != 0.0) {
                    sum[d] += batch.values[o];
                    count[d] += 1.0;
                }
            }
        }
    }
    NormStats stats{std::vector<double>(D, 0.0), std::vector<double>(D, 0.0)};
    for (std::size_t d = 0; d < D; ++d) stats.mean[d] = count[d] > 0.0 ? sum[d] / count[d] : 0.0;
    std::vector<double> sq(D, 0.0);
    for (auto n : samples) {
        for (std::size_t t = 0; t < batch.steps; ++t) {
            for (std::size_t d = 0; d < D; ++d) {
                const auto o = batch.offset(n, t, d);
                if (batch.mask[o] != 0.0) {
                    const double c = batch.values[o] - stats.mean[d];
                    sq[d] += c * c;
                }
            }
        }
    }
    for (std::size_t d = 0; d < D; ++d) stats.stddev[d] = count[d] > 0.0 ? std::sqrt(sq[d] / count[d]) : 0.0;
    return stats;
}

std::pair<MaskedBatch, NormStats> normalize(const MaskedBatch& batch, std::optional<NormStats> stats) {
    NormStats s = stats ? std::move(*stats) : compute_stats(batch);
    if (s.mean.size() != batch.features || s.stddev.size() != batch.features) {
        throw MismatchError("normalize: stats cover " + std::to_string(s.mean.size()) + " variables, batch has " +
                            std::to_string(batch.features));
    }
    MaskedBatch out = batch;
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        if (out.mask[i] != 0.0) out.values[i] = s.normalize(out.values[i], i % out.features);
    }
    return {std::move(out), std::move(s)};
}

MaskedBatch denormalize(const MaskedBatch& batch, const NormStats& stats) {
    MaskedBatch out = batch;
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        if (out.mask[i] != 0.0) out.values[i] = stats.denormalize(out.values[i], i % out.features);
    }
    return out;
}

std::pair<MaskedBatch, RemovalRecord> remove_values(const MaskedBatch& batch, double fraction, RemovalScope scope,
                                                    std::uint64_t seed, std::span<const std::size_t> train_samples) {
    if (!(fraction >= 0.0 && fraction < 1.0)) throw std::invalid_argument("remove_values: fraction must lie in [0, 1)");

    std::vector<std::size_t> eligible_samples;
    if (scope == RemovalScope::AllSplits) {
        eligible_samples.resize(batch.samples);
        std::iota(eligible_samples.begin(), eligible_samples.end(), std::size_t{0});
    } else {
        eligible_samples.assign(train_samples.begin(), train_samples.end());
        std::sort(eligible_samples.begin(), eligible_samples.end());
    }

    std::vector<std::size_t> candidates;
    for (auto n : eligible_samples) {
        for (std::size_t t = 0; t < batch.steps; ++t) {
            for (std::size_t d = 0; d < batch.features; ++d) {
                if (batch.observed(n, t, d)) candidates.push_back(batch.offset(n, t, d));
            }
        }
    }
    const auto count = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(candidates.size())));

    // Partial Fisher-Yates: the first `count` slots become the removal set.
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < count; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, candidates.size() - 1);
        std::swap(candidates[i], candidates[pick(rng)]);
    }
    candidates.resize(count);
    std::sort(candidates.begin(), candidates.end());

    MaskedBatch out = batch;
    RemovalRecord record;
    record.entries.reserve(count);
    const std::size_t cell = batch.steps * batch.features;
    for (auto o : candidates) {
        const std::size_t n = o / cell;
        const std::size_t t = (o % cell) / batch.features;
        const std::size_t d = o % batch.features;
        record.entries.push_back({n, t, d, out.values[o]});
        out.values[o] = 0.0;
        out.mask[o] = 0.0;
    }
    if (count > 0) rebuild_delta(out);
    return {std::move(out), std::move(record)};
}

MaskedBatch restore(const MaskedBatch& batch, const RemovalRecord& record) {
    MaskedBatch out = batch;
    for (const auto& e : record.entries) {
        const auto o = out.offset(e.sample, e.step, e.feature);
        out.values[o] = e.value;
        out.mask[o] = 1.0;
    }
    if (!record.empty()) rebuild_delta(out);
    return out;
}

std::vector<IrregularSeries> generate_synthetic(const SyntheticOptions& opt) {
    if (!(opt.missing_rate >= 0.0 && opt.missing_rate < 1.0)) {
        throw std::invalid_argument("generate_synthetic: missing_rate must lie in [0, 1)");
    }
    if (!(opt.positive_rate > 0.0 && opt.positive_rate < 1.0)) {
        throw std::invalid_argument("generate_synthetic: positive_rate must lie in (0, 1)");
    }
    if (opt.patients == 0 || opt.steps == 0 || opt.features == 0 || opt.latent_dim == 0) {
        throw std::invalid_argument("generate_synthetic: sizes must be positive");
    }
    const std::size_t N = opt.patients, T = opt.steps, D = opt.features, L = opt.latent_dim;

    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // Shared structure: mixing matrix, per-channel offset/scale, readout.
    std::vector<double> mixing(D * L);
    for (auto& v : mixing) v = normal(rng) / std::sqrt(static_cast<double>(L));
    std::vector<double> offset(D), scale(D);
    for (std::size_t d = 0; d < D; ++d) {
        offset[d] = 3.0 * normal(rng);
        scale[d] = 0.5 + 2.5 * unit(rng);
    }
    std::vector<double> readout(L);
    double norm = 0.0;
    for (auto& v : readout) {
        v = normal(rng);
        norm += v * v;
    }
    for (auto& v : readout) v /= std::sqrt(norm);

    const double innovation = std::sqrt(1.0 - opt.ar_coefficient * opt.ar_coefficient);
    std::vector<IrregularSeries> out(N);
    std::vector<double> score(N, 0.0);
    std::vector<double> latent(L);
    std::vector<double> cell_values(T * D);
    std::vector<char> cell_observed(T * D);
    for (std::size_t n = 0; n < N; ++n) {
        auto& s = out[n];
        s.patient_id = "P" + std::to_string(n);
        for (auto& z : latent) z = normal(rng);
        for (std::size_t t = 0; t < T; ++t) {
            if (t > 0) {
                for (auto& z : latent) z = opt.ar_coefficient * z + innovation * normal(rng);
            }
            for (std::size_t l = 0; l < L; ++l) score[n] += readout[l] * latent[l];
            for (std::size_t d = 0; d < D; ++d) {
                double mixed = 0.0;
                for (std::size_t l = 0; l < L; ++l) mixed += mixing[d * L + l] * latent[l];
                cell_values[t * D + d] = offset[d] + scale[d] * (mixed + opt.noise_std * normal(rng));
                cell_observed[t * D + d] = unit(rng) >= opt.missing_rate ? 1 : 0;
            }
        }
        score[n] /= static_cast<double>(T);

        if (std::none_of(cell_observed.begin(), cell_observed.end(), [](char c) { return c != 0; })) {
            std::uniform_int_distribution<std::size_t> pick(0, T * D - 1);
            cell_observed[pick(rng)] = 1;
        }
        for (std::size_t t = 0; t < T; ++t) {
            for (std::size_t d = 0; d < D; ++d) {
                if (!cell_observed[t * D + d]) continue;
                const double jitter = unit(rng) * opt.window_hours;
                s.events.push_back({static_cast<double>(t) * opt.window_hours + jitter, d, cell_values[t * D + d]});
            }
        }
    }

    std::vector<double> sorted = score;
    std::sort(sorted.begin(), sorted.end());
    auto positives = static_cast<std::size_t>(std::llround(opt.positive_rate * static_cast<double>(N)));
    positives = std::clamp<std::size_t>(positives, 1, N - (N > 1 ? 1 : 0));
    const std::size_t cut = N - positives;
    const double threshold = cut == 0 ? sorted.front() - 1.0 : 0.5 * (sorted[cut - 1] + sorted[cut]);
    for (std::size_t n = 0; n < N; ++n) out[n].label = score[n] > threshold ? 1 : 0;
    return out;
}

std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("kfold_split: k must be at least 2");
    if (n < k) throw std::invalid_argument("kfold_split: need at least k samples");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::vector<std::size_t>> folds(k);
    for (std::size_t i = 0; i < n; ++i) folds[i % k].push_back(order[i]);
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

}  // namespace vrin
