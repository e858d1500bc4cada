#pragma once

#include <cstdint>
#include <vector>

#include "tdet/annotations.hpp"
#include "tdet/features.hpp"

namespace tdet {

struct Snippet {
  MatrixF features;
  int target_class = kBackgroundClass;
  int center_s = 0;
};

struct SnippetDataset {
  std::vector<Snippet> snippets;
  std::size_t skipped_events = 0;
};

/// Rows [t - len/2, t - len/2 + len) of `features`, zero-padded where the
/// window leaves the sequence.
MatrixF extract_window(const MatrixF& features, int start, int length);

/// One snippet centred on each in-range event, plus background snippets
/// (class 17) drawn without replacement from seconds farther than
/// snippet_len_s from every event. The background count is
/// round(background_ratio * #events); with no events it is
/// round(background_ratio * floor(T / snippet_len_s)).
SnippetDataset build_snippet_dataset(const FeatureSequence& features,
                                     const std::vector<EventAnnotation>& events,
                                     int snippet_len_s, double background_ratio,
                                     std::uint64_t seed);

}  // namespace tdet
