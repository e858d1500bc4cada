#include "tdet/chunks.hpp"

#include <cmath>

#include "tdet/snippets.hpp"

namespace tdet {

RowVectorD one_hot(int class_index, int num_classes) {
  if (class_index < 0 || class_index >= num_classes) {
    throw Error(ErrorKind::domain, "class index out of range for one-hot target");
  }
  RowVectorD v = RowVectorD::Zero(num_classes);
  v(class_index) = 1.0;
  return v;
}

std::vector<int> chunk_starts(int length, int chunk_rows, int stride_rows) {
  if (chunk_rows < 1 || stride_rows < 1) {
    throw Error(ErrorKind::shape, "chunk size and stride must be >= 1");
  }
  std::vector<int> starts;
  for (int s = 0; s == 0 || (s < length && s - stride_rows + chunk_rows < length);
       s += stride_rows) {
    starts.push_back(s);
  }
  return starts;
}

int chunk_label(const std::vector<int>& times, const std::vector<int>& classes, int start,
                int length) {
  // Distances are compared doubled to stay in integers: 2t vs 2*start + length.
  const int center2 = 2 * start + length;
  int best = -1;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const int t = times[i];
    if (t < start || t >= start + length) continue;
    if (best < 0) {
      best = static_cast<int>(i);
      continue;
    }
    const int d = std::abs(2 * t - center2);
    const int bd = std::abs(2 * times[static_cast<std::size_t>(best)] - center2);
    if (d < bd || (d == bd && t < times[static_cast<std::size_t>(best)])) best = static_cast<int>(i);
  }
  return best < 0 ? kBackgroundClass : classes[static_cast<std::size_t>(best)];
}

std::vector<Chunk> make_chunks(const FeatureSequence& features,
                               const std::vector<EventAnnotation>& events, int chunk_size_s,
                               int stride_s) {
  const int rows = chunk_size_s * features.fps;
  const int stride = stride_s * features.fps;
  std::vector<int> times;
  std::vector<int> classes;
  for (const auto& e : events) {
    if (e.game_id != features.game_id || e.half != features.half) continue;
    if (e.class_index < 0 || e.class_index >= kNumEventClasses) continue;
    times.push_back(e.time_s * features.fps);
    classes.push_back(e.class_index);
  }
  std::vector<Chunk> out;
  for (const int s : chunk_starts(features.length(), rows, stride)) {
    Chunk c;
    c.features = extract_window(features.data, s, rows);
    c.target = one_hot(chunk_label(times, classes, s, rows));
    c.origin = {features.game_id, features.half, s / features.fps};
    out.push_back(std::move(c));
  }
  return out;
}

Chunk mixup_with_lambda(const Chunk& a, const Chunk& b, double lambda) {
  if (a.features.rows() != b.features.rows() || a.features.cols() != b.features.cols() ||
      a.target.size() != b.target.size()) {
    throw Error(ErrorKind::shape, "mixup needs chunks of identical shape");
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error(ErrorKind::domain, "mixup lambda must be in [0, 1]");
  if (lambda == 1.0) return a;
  Chunk out;
  const auto lf = static_cast<float>(lambda);
  out.features = lf * a.features + (1.0f - lf) * b.features;
  out.target = lambda * a.target + (1.0 - lambda) * b.target;
  out.origin = a.origin;
  return out;
}

Chunk mixup(const Chunk& a, const Chunk& b, double alpha, Rng& rng) {
  if (alpha <= 0) throw Error(ErrorKind::domain, "mixup alpha must be > 0");
  return mixup_with_lambda(a, b, rng.beta(alpha, alpha));
}

}  // namespace tdet
