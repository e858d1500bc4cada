#pragma once

#include <set>
#include <vector>

#include "tdet/grounding.hpp"
#include "tdet/nms.hpp"

namespace tdet {

/// Keeps p iff replay_end_s - threshold_s <= p.time_s <= replay_end_s.
std::vector<GroundingPrediction> filter_predictions(const std::vector<GroundingPrediction>& preds,
                                                    int replay_end_s, int threshold_s);

struct FusionConfig {
  int window_s = 42;  // W
  double min_confidence = 0.02;  // S
  double beta1 = 1.25;
  double beta2 = 0.8;
  std::set<int> allowed_classes;  // empty means fusion_default_classes()
};

/// Foul, Goal and Shots off target in the default vocabulary.
std::set<int> fusion_default_classes();

/// Among spots with an allowed class, confidence > S and time in [T - W, T],
/// the nearest and second-nearest to T become grounding predictions scored
/// beta1 * conf and beta2 * conf, clamped to [0, 1]. Distance ties resolve to
/// the earlier time, then higher confidence, then lower class index.
std::vector<GroundingPrediction> fuse_with_spotting(const std::vector<SpotPrediction>& spots,
                                                    int replay_start_s, const FusionConfig& config);

/// Greedy NMS over one list: accept the most confident remaining prediction,
/// drop everything within +/- window_s of it. Confidence ties resolve to the
/// earlier time, then input order. Output sorted by time.
std::vector<GroundingPrediction> nms_grounding(const std::vector<GroundingPrediction>& preds,
                                               int window_s);

/// Min-max normalizes each list on its own (a constant or single-element list
/// maps to 1.0), takes the union (a before b) and runs nms_grounding.
std::vector<GroundingPrediction> merge_nms(const std::vector<GroundingPrediction>& a,
                                           const std::vector<GroundingPrediction>& b, int window_s);

std::vector<GroundingPrediction> min_max_normalize(std::vector<GroundingPrediction> preds);

}  // namespace tdet
