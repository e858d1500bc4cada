#include "tdet/features.hpp"

#include <algorithm>
#include <numeric>

#include "tdet/npy.hpp"

namespace tdet {

void FeatureSequence::validate() const {
  if (data.rows() < 1 || data.cols() < 1) {
    throw Error(ErrorKind::shape, "feature sequence must have at least one row and column");
  }
  if (!data.allFinite()) {
    throw Error(ErrorKind::numeric, "feature sequence " + game_id + " contains NaN or Inf");
  }
  const int total = std::accumulate(source_dims.begin(), source_dims.end(), 0);
  if (total != dim()) {
    throw Error(ErrorKind::shape, "source_dims sum " + std::to_string(total) +
                                      " does not match feature width " + std::to_string(dim()));
  }
}

CombineResult combine_features(std::span<const FeatureSequence> sources,
                               const CombineOptions& options) {
  if (sources.empty()) throw Error(ErrorKind::shape, "combine_features needs at least one source");
  const auto& first = sources.front();
  int min_len = first.length();
  int max_len = first.length();
  int total_dim = 0;
  for (const auto& s : sources) {
    if (s.game_id != first.game_id || s.half != first.half || s.fps != first.fps) {
      throw Error(ErrorKind::identity, "cannot combine features of " + s.game_id + " half " +
                                           std::to_string(s.half) + " with " + first.game_id +
                                           " half " + std::to_string(first.half));
    }
    if (!s.data.allFinite()) {
      throw Error(ErrorKind::numeric, "source features contain NaN or Inf");
    }
    min_len = std::min(min_len, s.length());
    max_len = std::max(max_len, s.length());
    total_dim += s.dim();
  }
  if (max_len - min_len > options.length_slack_s) {
    throw Error(ErrorKind::alignment, "source lengths differ by " +
                                          std::to_string(max_len - min_len) + " s (slack " +
                                          std::to_string(options.length_slack_s) + ")");
  }

  CombineResult out;
  out.features.game_id = first.game_id;
  out.features.half = first.half;
  out.features.fps = first.fps;
  out.features.data.resize(min_len, total_dim);
  int col = 0;
  for (const auto& s : sources) {
    for (int t = 0; t < min_len; ++t) {
      const auto row = s.data.row(t);
      const double norm = row.cast<double>().norm();
      auto dst = out.features.data.block(t, col, 1, s.dim());
      if (norm > 0.0) {
        dst = (row.cast<double>() / norm).cast<float>();
      } else {
        dst.setZero();
        ++out.zero_norm_frames;
      }
    }
    out.features.source_dims.push_back(s.dim());
    col += s.dim();
  }
  return out;
}

FeatureSequence load_game_half(const std::filesystem::path& game_dir, const std::string& game_id,
                               int half, const CombineOptions& options) {
  namespace fs = std::filesystem;
  const std::string prefix = std::to_string(half) + "_";
  std::vector<fs::path> files;
  if (!fs::is_directory(game_dir)) {
    throw Error(ErrorKind::io, "no such game directory " + game_dir.string());
  }
  for (const auto& entry : fs::directory_iterator(game_dir)) {
    const auto name = entry.path().filename().string();
    if (entry.is_regular_file() && name.starts_with(prefix) && name.ends_with(".npy")) {
      files.push_back(entry.path());
    }
  }
  if (files.empty()) {
    throw Error(ErrorKind::io, "no feature files for half " + std::to_string(half) + " in " +
                                   game_dir.string());
  }
  std::sort(files.begin(), files.end());
  std::vector<FeatureSequence> sources;
  for (const auto& f : files) {
    FeatureSequence s;
    s.game_id = game_id;
    s.half = half;
    s.data = read_npy_file(f);
    s.source_dims = {static_cast<int>(s.data.cols())};
    sources.push_back(std::move(s));
  }
  if (sources.size() == 1) {
    sources.front().validate();
    return std::move(sources.front());
  }
  auto combined = combine_features(sources, options).features;
  combined.validate();
  return combined;
}

}  // namespace tdet
