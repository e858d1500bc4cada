#include "tdet/snippets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "tdet/rng.hpp"

namespace tdet {

MatrixF extract_window(const MatrixF& features, int start, int length) {
  MatrixF out = MatrixF::Zero(length, features.cols());
  const int rows = static_cast<int>(features.rows());
  const int lo = std::max(start, 0);
  const int hi = std::min(start + length, rows);
  if (hi > lo) {
    out.middleRows(lo - start, hi - lo) = features.middleRows(lo, hi - lo);
  }
  return out;
}

SnippetDataset build_snippet_dataset(const FeatureSequence& features,
                                     const std::vector<EventAnnotation>& events,
                                     int snippet_len_s, double background_ratio,
                                     std::uint64_t seed) {
  if (snippet_len_s < 1) throw Error(ErrorKind::domain, "snippet length must be >= 1");
  if (background_ratio < 0) throw Error(ErrorKind::domain, "background ratio must be >= 0");
  const int len = snippet_len_s * features.fps;
  const int T = features.length();

  SnippetDataset out;
  std::vector<int> event_times;
  for (const auto& e : events) {
    if (e.game_id != features.game_id || e.half != features.half || e.class_index < 0) continue;
    if (e.time_s < 0 || e.time_s >= T) {
      ++out.skipped_events;
      continue;
    }
    out.snippets.push_back({extract_window(features.data, e.time_s - len / 2, len), e.class_index,
                            e.time_s});
    event_times.push_back(e.time_s);
  }

  std::vector<int> eligible;
  for (int t = 0; t < T; ++t) {
    const bool far = std::all_of(event_times.begin(), event_times.end(),
                                 [&](int e) { return std::abs(t - e) > snippet_len_s; });
    if (far) eligible.push_back(t);
  }
  const double base = event_times.empty() ? std::floor(static_cast<double>(T) / snippet_len_s)
                                          : static_cast<double>(event_times.size());
  const auto wanted = static_cast<std::size_t>(std::llround(background_ratio * base));
  const std::size_t count = std::min(wanted, eligible.size());

  // Partial Fisher-Yates: the first `count` entries become a uniform sample.
  Rng rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(static_cast<long>(i),
                                                            static_cast<long>(eligible.size()) - 1));
    std::swap(eligible[i], eligible[j]);
  }
  std::sort(eligible.begin(), eligible.begin() + static_cast<std::ptrdiff_t>(count));
  for (std::size_t i = 0; i < count; ++i) {
    const int t = eligible[i];
    out.snippets.push_back({extract_window(features.data, t - len / 2, len), kBackgroundClass, t});
  }
  return out;
}

}  // namespace tdet
