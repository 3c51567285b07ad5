#include "vrin/baselines.hpp"

#include "vrin/errors.hpp"

namespace vrin {

std::vector<double> fill(const MaskedBatch& batch, FillMethod method, const NormStats& train_stats) {
    if (method != FillMethod::Zero && train_stats.mean.size() != batch.features) {
        throw MismatchError("fill: training stats do not match the batch's variable count");
    }
    std::vector<double> out = batch.values;
    if (method == FillMethod::Zero) return out;
    for (std::size_t n = 0; n < batch.samples; ++n) {
        for (std::size_t d = 0; d < batch.features; ++d) {
            double carry = train_stats.mean[d];
            for (std::size_t t = 0; t < batch.steps; ++t) {
                const auto o = batch.offset(n, t, d);
                if (batch.mask[o] != 0.0) {
                    carry = batch.values[o];
                } else {
                    out[o] = method == FillMethod::Mean ? train_stats.mean[d] : carry;
                }
            }
        }
    }
    return out;
}

}  // namespace vrin
