#pragma once

#include <string>
#include <vector>

#include "tdet/annotations.hpp"
#include "tdet/features.hpp"
#include "tdet/rng.hpp"

namespace tdet {

struct ChunkOrigin {
  std::string game_id;
  int half = 1;
  int start_s = 0;
};

/// Fixed-length window of a feature sequence and its 18-way target
/// distribution (one-hot, or a mixture after mix-up).
struct Chunk {
  MatrixF features;
  RowVectorD target;
  ChunkOrigin origin;
};

RowVectorD one_hot(int class_index, int num_classes = kNumClasses);

/// Window start positions 0, stride, 2*stride, ... stopping once a window
/// reaches the end of the sequence; with stride == chunk this yields
/// ceil(T / chunk) windows.
std::vector<int> chunk_starts(int length, int chunk_rows, int stride_rows);

/// Class of the window [start, start + length): the event inside it that is
/// nearest the window centre (earlier timestamp on exact ties), else
/// background. `times` and `classes` are parallel.
int chunk_label(const std::vector<int>& times, const std::vector<int>& classes, int start,
                int length);

std::vector<Chunk> make_chunks(const FeatureSequence& features,
                               const std::vector<EventAnnotation>& events, int chunk_size_s,
                               int stride_s);

/// lambda * a + (1 - lambda) * b for both features and targets.
Chunk mixup_with_lambda(const Chunk& a, const Chunk& b, double lambda);
/// Draws lambda ~ Beta(alpha, alpha).
Chunk mixup(const Chunk& a, const Chunk& b, double alpha, Rng& rng);

}  // namespace tdet
