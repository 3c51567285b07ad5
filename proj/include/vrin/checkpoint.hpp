#pragma once

// Binary model file:
//   "VRIN" | u32 version | u64 config length | config text
//   | u32 entry count | entries (u32 name length, name, u32 rank, u64 dims..., u64 offset)
//   | u64 payload length (doubles) | little-endian float64 payload
// Normalization statistics travel as the entries "stats.mean" and "stats.std".

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "vrin/model.hpp"

namespace vrin {

inline constexpr std::uint32_t kCheckpointVersion = 1;

std::string encode_checkpoint(const Model& model);
Model decode_checkpoint(std::string_view bytes);

void save_checkpoint(const std::filesystem::path& file, const Model& model);
Model load_checkpoint(const std::filesystem::path& file);

}  // namespace vrin
