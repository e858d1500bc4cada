#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tdet/adam.hpp"
#include "tdet/encoder.hpp"

namespace tdet {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Self-describing model container:
///
///   "TDETCKPT" | u32 version | u64 header bytes | JSON header | tensors
///
/// The header lists head kind, config, vocabulary, tensor directory and
/// optimizer step; tensors follow as little-endian float64 in directory
/// order (parameters, then Adam first and second moments when present).
struct Checkpoint {
  std::string head;
  nlohmann::json config = nlohmann::json::object();
  std::vector<std::string> vocabulary;
  Params params;
  std::optional<AdamState> optimizer;
};

std::string serialize_checkpoint(const Checkpoint& checkpoint);
Checkpoint deserialize_checkpoint(std::string_view bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

nlohmann::json encoder_config_to_json(const EncoderConfig& config);
EncoderConfig encoder_config_from_json(const nlohmann::json& j);

}  // namespace tdet
