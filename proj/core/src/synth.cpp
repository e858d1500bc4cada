#include "tdet/synth.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>

#include "tdet/rng.hpp"

namespace tdet {
namespace {

constexpr std::array<int, kNumEventClasses> kSynthOrder = {10, 2, 6, 5, 0, 1, 3, 4, 7,
                                                           8, 9, 11, 12, 13, 14, 15, 16};

bool overlaps(int a_lo, int a_hi, int b_lo, int b_hi) { return a_lo <= b_hi && b_lo <= a_hi; }

}  // namespace

void SynthConfig::validate() const {
  if (length_s < 1 || dim < 1) throw Error(ErrorKind::domain, "synth length and dim must be >= 1");
  if (num_classes < 1 || num_classes > kNumEventClasses || num_classes > dim) {
    throw Error(ErrorKind::domain, "synth class count must be in [1, min(17, dim)]");
  }
  if (events_per_class < 0 || noise_sigma < 0) {
    throw Error(ErrorKind::domain, "synth event count and noise must be non-negative");
  }
  if (replay_fraction < 0 || replay_fraction > 1) {
    throw Error(ErrorKind::domain, "replay fraction must be in [0, 1]");
  }
  if (delay_min_s < kSynthBumpRadius + 2 || delay_max_s < delay_min_s) {
    throw Error(ErrorKind::domain, "replay delays must satisfy 4 <= min <= max");
  }
  if (replay_len_min_s < 1 || replay_len_max_s < replay_len_min_s) {
    throw Error(ErrorKind::domain, "replay lengths must satisfy 1 <= min <= max");
  }
}

double synth_bump_amplitude(int offset) {
  const int d = std::abs(offset);
  return d > kSynthBumpRadius ? 0.0 : 1.0 - d / 3.0;
}

int synth_class_to_vocab(int synth_class) {
  return kSynthOrder.at(static_cast<std::size_t>(synth_class));
}

MatrixD synth_class_directions(int dim, int num_classes, std::uint64_t pattern_seed) {
  Rng rng(derive_seed(pattern_seed, 0xd1'5ec7ULL));
  MatrixD dirs(num_classes, dim);
  for (int c = 0; c < num_classes; ++c) {
    for (;;) {
      RowVectorD v(dim);
      for (int j = 0; j < dim; ++j) v(j) = rng.normal();
      for (int p = 0; p < c; ++p) v -= v.dot(dirs.row(p)) * dirs.row(p);
      const double n = v.norm();
      if (n > 1e-6) {
        dirs.row(c) = v / n;
        break;
      }
    }
  }
  return dirs;
}

SynthHalf synth_generate(const SynthConfig& config, std::uint64_t seed,
                         const ClassVocabulary& vocabulary) {
  config.validate();
  Rng rng(seed);
  const int T = config.length_s;
  const MatrixD dirs = synth_class_directions(config.dim, config.num_classes, config.pattern_seed);

  std::vector<PlantedEvent> planted = config.fixed_events;
  if (planted.empty()) {
    const int reserve = config.replay_fraction > 0 ? config.delay_max_s + 1 : 0;
    const int lo = config.edge_margin_s;
    const int hi = T - 1 - config.edge_margin_s - reserve;
    const int total = config.num_classes * config.events_per_class;
    if (total > 0 && hi < lo) {
      throw Error(ErrorKind::placement, "half is too short to place any event");
    }
    for (int i = 0; i < total; ++i) {
      const int cls = i % config.num_classes;
      bool placed = false;
      for (int attempt = 0; attempt < 10000 && !placed; ++attempt) {
        const int t = static_cast<int>(rng.uniform_int(lo, hi));
        placed = std::all_of(planted.begin(), planted.end(), [&](const PlantedEvent& p) {
          return std::abs(p.time_s - t) >= config.min_event_gap_s;
        });
        if (placed) planted.push_back({t, cls});
      }
      if (!placed) {
        throw Error(ErrorKind::placement, "cannot place " + std::to_string(total) + " events " +
                                              std::to_string(config.min_event_gap_s) +
                                              " s apart in " + std::to_string(T) + " s");
      }
    }
  }
  for (const auto& p : planted) {
    if (p.time_s < 0 || p.time_s >= T || p.synth_class < 0 || p.synth_class >= config.num_classes) {
      throw Error(ErrorKind::placement, "planted event out of range");
    }
  }
  std::sort(planted.begin(), planted.end(),
            [](const PlantedEvent& a, const PlantedEvent& b) { return a.time_s < b.time_s; });

  MatrixD data(T, config.dim);
  for (int t = 0; t < T; ++t) {
    for (int j = 0; j < config.dim; ++j) {
      data(t, j) = config.noise_sigma > 0 ? rng.normal(0.0, config.noise_sigma) : 0.0;
    }
  }
  for (const auto& p : planted) {
    for (int d = -kSynthBumpRadius; d <= kSynthBumpRadius; ++d) {
      const int t = p.time_s + d;
      if (t >= 0 && t < T) data.row(t) += synth_bump_amplitude(d) * dirs.row(p.synth_class);
    }
  }

  SynthHalf out;
  for (const auto& p : planted) {
    EventAnnotation ev;
    ev.game_id = config.game_id;
    ev.half = config.half;
    ev.time_s = p.time_s;
    ev.class_index = synth_class_to_vocab(p.synth_class);
    ev.label = vocabulary.name(ev.class_index);
    out.events.push_back(std::move(ev));
  }

  // Replays copy the event rows as they were before any replay was added.
  const MatrixD event_rows = data;
  std::vector<std::pair<int, int>> occupied;
  for (const auto& p : planted) {
    occupied.emplace_back(p.time_s - kSynthBumpRadius, p.time_s + kSynthBumpRadius);
  }
  for (const auto& p : planted) {
    if (config.replay_fraction <= 0 || rng.uniform() >= config.replay_fraction) continue;
    bool placed = false;
    for (int attempt = 0; attempt < 64 && !placed; ++attempt) {
      const int delay = static_cast<int>(rng.uniform_int(config.delay_min_s, config.delay_max_s));
      int len = static_cast<int>(rng.uniform_int(config.replay_len_min_s, config.replay_len_max_s));
      len = std::min(len, delay - kSynthBumpRadius - 1);
      const int end = p.time_s + delay;
      const int start = end - len;
      if (end >= T || start <= p.time_s + kSynthBumpRadius) continue;
      const bool clash = std::any_of(occupied.begin(), occupied.end(), [&](const auto& iv) {
        return overlaps(start, end, iv.first, iv.second);
      });
      if (clash) continue;
      placed = true;
      occupied.emplace_back(start, end);
      for (int k = 0; k <= 2 * kSynthBumpRadius && start + k <= end; ++k) {
        const int src = p.time_s - kSynthBumpRadius + k;
        if (src >= 0) data.row(start + k) += event_rows.row(src);
      }
      ReplayAnnotation r;
      r.game_id = config.game_id;
      r.half = config.half;
      r.replay_start_s = start;
      r.replay_end_s = end;
      r.event_time_s = p.time_s;
      r.class_index = synth_class_to_vocab(p.synth_class);
      r.event_label = vocabulary.name(r.class_index);
      out.replays.push_back(std::move(r));
    }
    if (!placed) {
      throw Error(ErrorKind::placement, "cannot place a replay for the event at " +
                                            std::to_string(p.time_s) + " s without overlap");
    }
  }
  std::sort(out.replays.begin(), out.replays.end(),
            [](const ReplayAnnotation& a, const ReplayAnnotation& b) {
              return a.replay_start_s < b.replay_start_s;
            });

  out.features.game_id = config.game_id;
  out.features.half = config.half;
  out.features.data = data.cast<float>();
  out.features.source_dims = {config.dim};
  return out;
}

}  // namespace tdet
