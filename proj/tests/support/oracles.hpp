#pragma once

// Slow, direct reimplementations used to cross-check the library.

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "tdet/annotations.hpp"
#include "tdet/grounding.hpp"
#include "tdet/nms.hpp"
#include "tdet/postprocess.hpp"
#include "tdet/rng.hpp"

namespace tdet::oracle {

/// Rescans the whole remaining pool for the best prediction on every round.
inline std::vector<SpotPrediction> greedy_nms(const std::vector<SpotPrediction>& preds, int window) {
  std::vector<bool> alive(preds.size(), true);
  std::vector<SpotPrediction> kept;
  while (true) {
    int best = -1;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      if (!alive[i]) continue;
      if (best < 0) {
        best = static_cast<int>(i);
        continue;
      }
      const auto& b = preds[static_cast<std::size_t>(best)];
      const auto& p = preds[i];
      if (p.confidence > b.confidence || (p.confidence == b.confidence && p.time_s < b.time_s)) {
        best = static_cast<int>(i);
      }
    }
    if (best < 0) break;
    const SpotPrediction winner = preds[static_cast<std::size_t>(best)];
    kept.push_back(winner);
    for (std::size_t i = 0; i < preds.size(); ++i) {
      const auto& p = preds[i];
      if (alive[i] && p.game_id == winner.game_id && p.half == winner.half &&
          p.class_index == winner.class_index && std::abs(p.time_s - winner.time_s) <= window) {
        alive[i] = false;
      }
    }
  }
  return kept;
}

inline std::vector<GroundingPrediction> greedy_nms(const std::vector<GroundingPrediction>& preds,
                                                   int window) {
  std::vector<bool> alive(preds.size(), true);
  std::vector<GroundingPrediction> kept;
  while (true) {
    int best = -1;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      if (!alive[i]) continue;
      if (best < 0) {
        best = static_cast<int>(i);
        continue;
      }
      const auto& b = preds[static_cast<std::size_t>(best)];
      const auto& p = preds[i];
      if (p.confidence > b.confidence || (p.confidence == b.confidence && p.time_s < b.time_s)) {
        best = static_cast<int>(i);
      }
    }
    if (best < 0) break;
    const GroundingPrediction winner = preds[static_cast<std::size_t>(best)];
    kept.push_back(winner);
    for (std::size_t i = 0; i < preds.size(); ++i) {
      if (alive[i] && std::abs(preds[i].time_s - winner.time_s) <= window) alive[i] = false;
    }
  }
  return kept;
}

inline std::vector<GroundingPrediction> normalize(std::vector<GroundingPrediction> preds) {
  if (preds.empty()) return preds;
  double lo = preds[0].confidence, hi = preds[0].confidence;
  for (const auto& p : preds) {
    lo = std::min(lo, p.confidence);
    hi = std::max(hi, p.confidence);
  }
  for (auto& p : preds) p.confidence = hi > lo ? (p.confidence - lo) / (hi - lo) : 1.0;
  return preds;
}

inline std::vector<GroundingPrediction> merge(const std::vector<GroundingPrediction>& a,
                                              const std::vector<GroundingPrediction>& b, int window) {
  auto all = normalize(a);
  for (const auto& p : normalize(b)) all.push_back(p);
  return greedy_nms(all, window);
}

/// Rank every surviving spot by how many others beat it; ranks 0 and 1 win.
inline std::vector<GroundingPrediction> fuse(const std::vector<SpotPrediction>& spots, int T,
                                             const FusionConfig& cfg) {
  const std::set<int> allowed = cfg.allowed_classes.empty() ? fusion_default_classes() : cfg.allowed_classes;
  std::vector<SpotPrediction> pool;
  for (const auto& s : spots) {
    if (allowed.count(s.class_index) && s.confidence > cfg.min_confidence && s.time_s >= T - cfg.window_s &&
        s.time_s <= T) {
      pool.push_back(s);
    }
  }
  const auto key = [&](const SpotPrediction& s) {
    return std::make_tuple(T - s.time_s, s.time_s, -s.confidence, s.class_index);
  };
  std::vector<GroundingPrediction> out(std::min<std::size_t>(2, pool.size()));
  for (std::size_t i = 0; i < pool.size(); ++i) {
    std::size_t beaten_by = 0, equal_before = 0;
    for (std::size_t j = 0; j < pool.size(); ++j) {
      if (j == i) continue;
      if (key(pool[j]) < key(pool[i])) ++beaten_by;
      if (j < i && key(pool[j]) == key(pool[i])) ++equal_before;
    }
    const std::size_t rank = beaten_by + equal_before;
    if (rank < out.size()) {
      const double beta = rank == 0 ? cfg.beta1 : cfg.beta2;
      out[rank] = {pool[i].game_id, pool[i].half, pool[i].time_s,
                   std::min(1.0, std::max(0.0, beta * pool[i].confidence))};
    }
  }
  return out;
}

/// Greedy matching spelled out step by step, then AP as the sum over hits of
/// the best precision achieved at that recall or beyond.
inline std::optional<double> average_precision(const std::vector<SpotPrediction>& preds,
                                               const std::vector<EventAnnotation>& gts, int cls, int tol) {
  std::vector<SpotPrediction> ps;
  for (const auto& p : preds) {
    if (p.class_index == cls) ps.push_back(p);
  }
  std::vector<EventAnnotation> gs;
  for (const auto& g : gts) {
    if (g.class_index == cls) gs.push_back(g);
  }
  if (gs.empty() && ps.empty()) return std::nullopt;
  if (gs.empty()) return 0.0;
  std::stable_sort(ps.begin(), ps.end(), [](const SpotPrediction& a, const SpotPrediction& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    return std::tie(a.game_id, a.half, a.time_s) < std::tie(b.game_id, b.half, b.time_s);
  });
  std::vector<bool> used(gs.size(), false);
  std::vector<bool> hit(ps.size(), false);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    int best = -1;
    for (std::size_t j = 0; j < gs.size(); ++j) {
      if (used[j] || gs[j].game_id != ps[i].game_id || gs[j].half != ps[i].half) continue;
      const int d = std::abs(gs[j].time_s - ps[i].time_s);
      if (d > tol) continue;
      if (best < 0) {
        best = static_cast<int>(j);
        continue;
      }
      const auto& b = gs[static_cast<std::size_t>(best)];
      const int bd = std::abs(b.time_s - ps[i].time_s);
      if (d < bd || (d == bd && gs[j].time_s < b.time_s)) best = static_cast<int>(j);
    }
    if (best >= 0) {
      used[static_cast<std::size_t>(best)] = true;
      hit[i] = true;
    }
  }
  double ap = 0.0;
  for (std::size_t k = 0; k < ps.size(); ++k) {
    if (!hit[k]) continue;
    double best_precision = 0.0;
    for (std::size_t j = k; j < ps.size(); ++j) {
      const auto tp = std::count(hit.begin(), hit.begin() + static_cast<std::ptrdiff_t>(j + 1), true);
      best_precision = std::max(best_precision, static_cast<double>(tp) / static_cast<double>(j + 1));
    }
    ap += best_precision / static_cast<double>(gs.size());
  }
  return ap;
}

// Random instance generators shared by the unit and acceptance suites.

inline std::vector<SpotPrediction> random_spots(Rng& rng, int max_count, int classes = 3, int halves = 2,
                                                int horizon = 200) {
  const int n = static_cast<int>(rng.uniform_int(0, max_count));
  std::vector<SpotPrediction> out;
  for (int i = 0; i < n; ++i) {
    SpotPrediction p;
    p.game_id = rng.uniform() < 0.5 ? "a" : "b";
    p.half = static_cast<int>(rng.uniform_int(1, halves));
    p.time_s = static_cast<int>(rng.uniform_int(0, horizon));
    p.class_index = static_cast<int>(rng.uniform_int(0, classes - 1));
    // Coarse confidences so ties are common.
    p.confidence = static_cast<double>(rng.uniform_int(0, 20)) / 20.0;
    out.push_back(p);
  }
  return out;
}

inline std::vector<GroundingPrediction> random_grounding(Rng& rng, int max_count, int horizon = 300) {
  const int n = static_cast<int>(rng.uniform_int(0, max_count));
  std::vector<GroundingPrediction> out;
  for (int i = 0; i < n; ++i) {
    const int t = static_cast<int>(rng.uniform_int(0, horizon));
    out.push_back({"g", 1, t, static_cast<double>(rng.uniform_int(0, 30)) / 30.0});
  }
  return out;
}

inline auto order_key(const SpotPrediction& p) {
  return std::tie(p.game_id, p.half, p.time_s, p.class_index, p.confidence);
}
inline auto order_key(const GroundingPrediction& p) {
  return std::tie(p.game_id, p.half, p.time_s, p.confidence);
}

template <class T>
std::vector<T> sorted_by_time(std::vector<T> v) {
  std::sort(v.begin(), v.end(), [](const T& a, const T& b) { return order_key(a) < order_key(b); });
  return v;
}

}  // namespace tdet::oracle

namespace tdet {

// Readable gtest failure output.
inline void PrintTo(const SpotPrediction& p, std::ostream* os) {
  *os << "{" << p.game_id << " h" << p.half << " t" << p.time_s << " c" << p.class_index << " " << p.confidence << "}";
}
inline void PrintTo(const GroundingPrediction& p, std::ostream* os) {
  *os << "{" << p.game_id << " h" << p.half << " t" << p.time_s << " " << p.confidence << "}";
}

}  // namespace tdet
