#include "tdet/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tdet {

std::vector<GroundingPrediction> filter_predictions(const std::vector<GroundingPrediction>& preds,
                                                    int replay_end_s, int threshold_s) {
  std::vector<GroundingPrediction> out;
  for (const auto& p : preds) {
    if (p.time_s >= replay_end_s - threshold_s && p.time_s <= replay_end_s) out.push_back(p);
  }
  return out;
}

std::set<int> fusion_default_classes() {
  const ClassVocabulary v = ClassVocabulary::soccernet_v2();
  return {*v.index_of("Foul"), *v.index_of("Goal"), *v.index_of("Shots off target")};
}

std::vector<GroundingPrediction> fuse_with_spotting(const std::vector<SpotPrediction>& spots,
                                                    int replay_start_s, const FusionConfig& config) {
  const std::set<int> allowed =
      config.allowed_classes.empty() ? fusion_default_classes() : config.allowed_classes;
  const int t_hi = replay_start_s;
  const int t_lo = replay_start_s - config.window_s;
  std::vector<const SpotPrediction*> kept;
  for (const auto& s : spots) {
    if (!allowed.contains(s.class_index) || !(s.confidence > config.min_confidence)) continue;
    if (s.time_s < t_lo || s.time_s > t_hi) continue;
    kept.push_back(&s);
  }
  const auto closer = [&](const SpotPrediction* a, const SpotPrediction* b) {
    const int da = std::abs(t_hi - a->time_s);
    const int db = std::abs(t_hi - b->time_s);
    if (da != db) return da < db;
    if (a->time_s != b->time_s) return a->time_s < b->time_s;
    if (a->confidence != b->confidence) return a->confidence > b->confidence;
    return a->class_index < b->class_index;
  };
  const std::size_t n = std::min<std::size_t>(2, kept.size());
  std::partial_sort(kept.begin(), kept.begin() + static_cast<std::ptrdiff_t>(n), kept.end(), closer);
  std::vector<GroundingPrediction> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double beta = i == 0 ? config.beta1 : config.beta2;
    out.push_back({kept[i]->game_id, kept[i]->half, kept[i]->time_s,
                   std::clamp(beta * kept[i]->confidence, 0.0, 1.0)});
  }
  return out;
}

std::vector<GroundingPrediction> nms_grounding(const std::vector<GroundingPrediction>& preds,
                                               int window_s) {
  std::vector<std::size_t> order(preds.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (preds[a].confidence != preds[b].confidence) return preds[a].confidence > preds[b].confidence;
    return preds[a].time_s < preds[b].time_s;
  });
  std::vector<GroundingPrediction> out;
  for (const std::size_t i : order) {
    const bool suppressed = std::any_of(out.begin(), out.end(), [&](const GroundingPrediction& k) {
      return std::abs(k.time_s - preds[i].time_s) <= window_s;
    });
    if (!suppressed) out.push_back(preds[i]);
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.time_s < b.time_s;
  });
  return out;
}

std::vector<GroundingPrediction> min_max_normalize(std::vector<GroundingPrediction> preds) {
  if (preds.empty()) return preds;
  const auto [lo, hi] = std::minmax_element(preds.begin(), preds.end(), [](const auto& a, const auto& b) {
    return a.confidence < b.confidence;
  });
  const double mn = lo->confidence;
  const double range = hi->confidence - mn;
  for (auto& p : preds) p.confidence = range > 0 ? (p.confidence - mn) / range : 1.0;
  return preds;
}

std::vector<GroundingPrediction> merge_nms(const std::vector<GroundingPrediction>& a,
                                           const std::vector<GroundingPrediction>& b, int window_s) {
  std::vector<GroundingPrediction> all = min_max_normalize(a);
  for (auto& p : min_max_normalize(b)) all.push_back(std::move(p));
  return nms_grounding(all, window_s);
}

}  // namespace tdet
