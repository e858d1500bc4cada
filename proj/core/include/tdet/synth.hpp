#pragma once

#include <cstdint>
#include <vector>

#include "tdet/annotations.hpp"
#include "tdet/features.hpp"

namespace tdet {

struct PlantedEvent {
  int time_s = 0;
  int synth_class = 0;  // 0 .. num_classes-1
};

/// Desk-scale generator parameters. Each planted event adds amplitude
/// (1 - |d|/3) * direction[class] at offsets d in [-2, 2] on top of N(0, sigma)
/// noise; a replay re-adds the event's rows at the start of its interval.
struct SynthConfig {
  std::string game_id = "synth_000";
  int half = 1;
  int length_s = 600;
  int dim = 32;
  int num_classes = 3;
  int events_per_class = 4;
  double noise_sigma = 0.25;
  int min_event_gap_s = 25;
  int edge_margin_s = 3;
  /// When non-empty these events are planted instead of random ones.
  std::vector<PlantedEvent> fixed_events;

  double replay_fraction = 1.0;
  int delay_min_s = 10;  // replay_end - event_time
  int delay_max_s = 110;
  int replay_len_min_s = 4;
  int replay_len_max_s = 8;

  /// Seeds the class directions; keep it fixed across halves so classes mean
  /// the same thing everywhere.
  std::uint64_t pattern_seed = 0;

  void validate() const;
};

struct SynthHalf {
  FeatureSequence features;
  std::vector<EventAnnotation> events;
  std::vector<ReplayAnnotation> replays;
};

inline constexpr int kSynthBumpRadius = 2;
double synth_bump_amplitude(int offset);

/// Vocabulary index used for synthetic class j: Foul, Goal, Shots off target
/// first, then the remaining classes in vocabulary order.
int synth_class_to_vocab(int synth_class);

/// num_classes x dim matrix of orthonormal rows.
MatrixD synth_class_directions(int dim, int num_classes, std::uint64_t pattern_seed);

SynthHalf synth_generate(const SynthConfig& config, std::uint64_t seed,
                         const ClassVocabulary& vocabulary);

}  // namespace tdet
