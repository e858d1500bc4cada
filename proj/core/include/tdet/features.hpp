#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "tdet/tensor.hpp"

namespace tdet {

/// Per-second embeddings for one half of one game (T rows x D columns).
struct FeatureSequence {
  std::string game_id;
  int half = 1;
  int fps = 1;
  MatrixF data;
  std::vector<int> source_dims;

  int length() const noexcept { return static_cast<int>(data.rows()); }
  int dim() const noexcept { return static_cast<int>(data.cols()); }

  /// Checks T >= 1, D >= 1, finite values and sum(source_dims) == D.
  void validate() const;
};

struct CombineOptions {
  int length_slack_s = 2;
};

struct CombineResult {
  FeatureSequence features;
  std::size_t zero_norm_frames = 0;
};

/// L2-normalizes each source frame independently, then concatenates the
/// sources column-wise over the shortest common length.
CombineResult combine_features(std::span<const FeatureSequence> sources,
                               const CombineOptions& options = {});

/// Loads every "<half>_<source>.npy" in `game_dir` for the half, sorted by
/// source name, and combines them. A single source is returned unmodified.
FeatureSequence load_game_half(const std::filesystem::path& game_dir, const std::string& game_id,
                               int half, const CombineOptions& options = {});

}  // namespace tdet
