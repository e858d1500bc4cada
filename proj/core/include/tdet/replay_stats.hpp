#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tdet/annotations.hpp"

namespace tdet {

struct HistogramBucket {
  int lo_s = 0;  // inclusive
  int hi_s = 0;  // exclusive
  long count = 0;
};

struct ReplayStatsOptions {
  int bucket_s = 10;
  /// Drop negative intervals from the denominator of fraction_in_0_120.
  bool exclude_anomalous = false;
};

struct ReplayStats {
  std::vector<HistogramBucket> interval_histogram;  // non-negative intervals
  long anomalous = 0;                               // negative intervals
  long total = 0;
  double fraction_in_0_120 = 0.0;
  std::vector<std::pair<std::string, long>> class_counts;  // descending, ties by name

  std::string to_json() const;
  /// Bar chart of the interval histogram.
  std::string to_svg() const;
};

/// Interval = replay_end_s - event_time_s.
ReplayStats replay_stats(const std::vector<ReplayAnnotation>& replays,
                         const ReplayStatsOptions& options = {});

}  // namespace tdet
