#include "tdet/nms.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <numeric>
#include <tuple>

namespace tdet {

std::vector<SpotPrediction> nms_1d(const std::vector<SpotPrediction>& preds, int window_s) {
  std::map<std::tuple<std::string, int, int>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    groups[{preds[i].game_id, preds[i].half, preds[i].class_index}].push_back(i);
  }
  std::vector<SpotPrediction> out;
  for (auto& [key, idx] : groups) {
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      if (preds[a].confidence != preds[b].confidence) return preds[a].confidence > preds[b].confidence;
      return preds[a].time_s < preds[b].time_s;
    });
    std::vector<int> kept_times;
    for (const std::size_t i : idx) {
      const int t = preds[i].time_s;
      const bool suppressed = std::any_of(kept_times.begin(), kept_times.end(),
                                          [&](int k) { return std::abs(k - t) <= window_s; });
      if (!suppressed) {
        kept_times.push_back(t);
        out.push_back(preds[i]);
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const SpotPrediction& a, const SpotPrediction& b) {
    return std::tie(a.game_id, a.half, a.time_s, a.class_index) <
           std::tie(b.game_id, b.half, b.time_s, b.class_index);
  });
  return out;
}

}  // namespace tdet
