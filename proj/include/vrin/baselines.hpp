#pragma once

#include <vector>

#include "vrin/data.hpp"

namespace vrin {

enum class FillMethod { Mean, Forward, Zero };

// Completed N*T*D values in the batch's units. Observed entries are copied
// unchanged. Forward fill starts from the training mean until a variable is
// first observed. `train_stats` must come from the training split and be in
// the same units as the batch.
std::vector<double> fill(const MaskedBatch& batch, FillMethod method, const NormStats& train_stats);

}  // namespace vrin
