#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tdet/annotations.hpp"
#include "tdet/grounding.hpp"
#include "tdet/nms.hpp"

namespace tdet {

/// 5, 10, ..., 60.
std::vector<int> default_tolerances();
/// Parses "lo:hi:step" or a comma list such as "5,10,30".
std::vector<int> parse_tolerances(const std::string& text);

struct MatchCounts {
  long true_positives = 0;
  long false_positives = 0;
  long missed = 0;
};

/// Area under the all-points interpolated precision-recall curve for ranked
/// hits. `is_tp[i]` refers to the i-th prediction in descending confidence.
double ranked_average_precision(const std::vector<bool>& is_tp, std::size_t num_gt);

/// Greedy one-to-one matching of `class_index` predictions (descending
/// confidence; ties by game, half, time) to the nearest unmatched ground
/// truth of the same game, half and class within +/- tolerance_s (distance
/// ties go to the earlier ground truth). Returns nullopt when the class has
/// neither ground truth nor predictions, 0 when it has only predictions.
std::optional<double> average_precision_at_tol(const std::vector<SpotPrediction>& preds,
                                               const std::vector<EventAnnotation>& gts,
                                               int class_index, int tolerance_s,
                                               MatchCounts* counts = nullptr);

struct EvalReport {
  std::vector<int> tolerances;
  /// class index -> AP per tolerance (same order as `tolerances`); classes
  /// without ground truth and predictions are absent.
  std::map<int, std::vector<double>> per_class_ap;
  std::vector<double> map_per_tolerance;
  double average_map = 0.0;
  std::vector<MatchCounts> counts;  // per tolerance, summed over classes

  std::string to_json(const ClassVocabulary& vocabulary) const;
  std::string to_csv(const ClassVocabulary& vocabulary) const;
};

/// mAP per tolerance is the mean AP over the event classes that are not
/// excluded; Average-mAP is the mean over tolerances.
EvalReport average_map(const std::vector<SpotPrediction>& preds,
                       const std::vector<EventAnnotation>& gts,
                       const std::vector<int>& tolerances = default_tolerances());

struct GroundingEvalReport {
  std::vector<int> tolerances;
  std::vector<double> ap_per_tolerance;
  double average_ap = 0.0;
  std::vector<MatchCounts> counts;

  std::string to_json() const;
};

/// All queries pooled as one class; each query's ground-truth time is
/// matchable only by that query's predictions.
GroundingEvalReport replay_average_ap(const std::vector<std::vector<GroundingPrediction>>& preds,
                                      const std::vector<int>& gt_times,
                                      const std::vector<int>& tolerances = default_tolerances());

}  // namespace tdet
