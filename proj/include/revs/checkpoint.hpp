#pragma once

#include <string>

#include "revs/model.hpp"

namespace revs {

inline constexpr const char* kCheckpointFormat = "revs-checkpoint-v1";

/// Writes `dir`/manifest.json and `dir`/tensors.bin. Values are stored as
/// float32, so only states already at storage precision round-trip exactly.
void save_checkpoint(const ModelState& state, const std::string& dir);

/// Validates the manifest (format, config, exact tensor directory, offsets,
/// sizes) before reading any tensor, then verifies each CRC32C.
ModelState load_checkpoint(const std::string& dir);

std::string model_config_to_json(const ModelConfig& config);
ModelConfig model_config_from_json(const std::string& text);

}  // namespace revs
