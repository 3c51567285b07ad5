#pragma once

// Plain-text run reports:
//   [run]      key = value
//   [config]   the flat config text
//   [epochs]   one row per epoch of mean loss terms
//   [metrics]  name = value rows
// Wall-clock time is deliberately left out so reruns diff cleanly.

#include <string>

#include "vrin/trainer.hpp"

namespace vrin {

std::string format_report(const RunReport& report);

// "%.10g"; enough to compare runs, stable across platforms.
std::string format_value(double v);

}  // namespace vrin
