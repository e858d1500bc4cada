#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tdet/adam.hpp"
#include "tdet/annotations.hpp"
#include "tdet/checkpoint.hpp"
#include "tdet/encoder.hpp"
#include "tdet/features.hpp"
#include "tdet/gradcheck.hpp"
#include "tdet/spotting.hpp"

namespace tdet {

struct GroundingPrediction {
  std::string game_id;
  int half = 1;
  int time_s = 0;
  double confidence = 0.0;

  friend bool operator==(const GroundingPrediction&, const GroundingPrediction&) = default;
};

struct GroundingSampling {
  int chunk_s = 30;
  int window_s = 120;  // candidates come from [replay_start - window_s, replay_start]
  int positives = 4;
  int negatives = 4;
  int replay_len_s = 30;
};

struct GroundingSample {
  MatrixF candidate;
  MatrixF replay;
  int label = 0;
  std::optional<double> offset_target;  // (event - chunk_start) / chunk_s, positives only
  int candidate_start_s = 0;
};

struct GroundingPairs {
  std::vector<GroundingSample> samples;
  bool skipped = false;
  std::string reason;
};

/// Replay interval rows, truncated or zero-padded to `length` rows.
MatrixF replay_clip(const FeatureSequence& features, const ReplayAnnotation& replay, int length);

/// Candidate chunk starts lie in [lo, max(lo, start - chunk)] with
/// lo = max(0, start - window). Positives contain the event, negatives do not.
/// A replay whose event lies outside the window is skipped.
GroundingPairs sample_grounding_pairs(const ReplayAnnotation& replay,
                                      const FeatureSequence& features, Rng& rng,
                                      const GroundingSampling& sampling = {});

/// 4 layers, 4 heads, width 32, feed-forward 128, 2 outputs, 2 segments.
EncoderConfig grounding_encoder_config(int input_dim);

struct GroundingModel {
  EncoderConfig encoder;
  Params params;
  GroundingSampling sampling;

  Checkpoint to_checkpoint(const std::vector<std::string>& vocabulary,
                           const std::optional<AdamState>& optimizer = std::nullopt) const;
  static GroundingModel from_checkpoint(const Checkpoint& checkpoint);
};

GroundingModel make_grounding_model(const EncoderConfig& config, std::uint64_t seed,
                                    const GroundingSampling& sampling = {});

struct GroundingOutput {
  double prob = 0.5;
  double offset = 0.0;
};

/// Candidate rows followed by replay rows, with segment ids 0 and 1.
MatrixD grounding_input(const MatrixF& candidate, const MatrixF& replay, std::vector<int>& segments);

GroundingOutput ground_forward(const GroundingModel& model, const GroundingSample& sample);

inline constexpr double kProbClamp = 1e-7;

/// BCE on the clamped probability plus offset_weight * (offset - target)^2
/// for positives only.
double ground_loss(const GroundingOutput& prediction, const GroundingSample& sample,
                   double offset_weight = 1.0);

/// Full forward + loss; accumulates parameter gradients when `grads` is set.
double grounding_sample_loss(const GroundingModel& model, const GroundingSample& sample,
                             double offset_weight, bool train_mode, Rng* rng, Params* grads);

struct ReplayEpisode {
  ReplayAnnotation replay;
  std::shared_ptr<const FeatureSequence> features;
};

struct EpisodeSplits {
  std::vector<ReplayEpisode> train;
  std::vector<ReplayEpisode> valid;
  std::vector<ReplayEpisode> test;
};

struct GroundingTrainSpec {
  TrainMode mode = TrainMode::ultra;
  double lr = 2e-4;
  int epochs = 40;
  int batch_size = 32;
  double offset_weight = 1.0;
  std::uint64_t seed = 0;
};

struct GroundingTrainResult {
  GroundingModel model;
  AdamState optimizer;
  TrainHistory history;
  std::size_t skipped_replays = 0;
};

/// Pairs are redrawn every epoch from the seeded generator; the validation
/// set is drawn once.
GroundingTrainResult train_grounding(const EpisodeSplits& splits, const GroundingTrainSpec& spec,
                                     GroundingModel initial);

struct ReplayQuery {
  std::string game_id;
  int half = 1;
  int start_s = 0;
  int end_s = 0;
};

/// Slides chunk_s candidates at stride_s over the window before the replay
/// start; each yields time = start + chunk_s * clamp(offset, 0, 1) and
/// confidence = probability. Single precision. A replay starting at 0 has
/// an empty window and yields no predictions.
std::vector<GroundingPrediction> infer_grounding(const GroundingModel& model,
                                                 const ReplayQuery& query,
                                                 const FeatureSequence& features, int stride_s = 5);

GradCheckReport grounding_grad_check(GroundingModel& model, int trials, double h,
                                     std::uint64_t seed, double offset_weight = 1.0);

}  // namespace tdet
