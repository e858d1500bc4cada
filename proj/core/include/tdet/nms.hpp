#pragma once

#include <string>
#include <vector>

namespace tdet {

struct SpotPrediction {
  std::string game_id;
  int half = 1;
  int time_s = 0;
  int class_index = 0;
  double confidence = 0.0;

  friend bool operator==(const SpotPrediction&, const SpotPrediction&) = default;
};

/// Greedy temporal NMS per (game, half, class): repeatedly accept the most
/// confident remaining prediction and drop same-group predictions within
/// +/- window_s of it. Equal confidences resolve to the earlier time, then
/// input order. Output is sorted by (game, half, time, class).
std::vector<SpotPrediction> nms_1d(const std::vector<SpotPrediction>& predictions, int window_s);

}  // namespace tdet
