#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tdet/adam.hpp"
#include "tdet/checkpoint.hpp"
#include "tdet/chunks.hpp"
#include "tdet/encoder.hpp"
#include "tdet/gradcheck.hpp"
#include "tdet/netvlad.hpp"
#include "tdet/nms.hpp"

namespace tdet {

enum class TrainMode { regular, ultra };
enum class SpottingHead { transformer, netvlad };

std::string to_string(TrainMode mode);
std::string to_string(SpottingHead head);
TrainMode parse_train_mode(const std::string& text);
SpottingHead parse_spotting_head(const std::string& text);

struct TrainSpec {
  TrainMode mode = TrainMode::ultra;
  double lr = 5e-4;
  int epochs = 50;
  int batch_size = 32;
  int chunk_size_s = 7;
  /// Training window stride; 0 means one chunk length.
  int chunk_stride_s = 0;
  int nms_window_s = 20;
  /// Beta(alpha, alpha) mix-up; 0 disables it.
  double mixup_alpha = 0.2;
  std::uint64_t seed = 0;

  /// transformer: lr 5e-4, 50 epochs; netvlad: lr 1e-4, 40 epochs.
  static TrainSpec defaults(SpottingHead head, TrainMode mode = TrainMode::ultra);
};

/// 3 layers, 4 heads, width 64, feed-forward 256, 18 outputs.
EncoderConfig spotting_encoder_config(int input_dim);

struct SpottingModel {
  SpottingHead head = SpottingHead::transformer;
  EncoderConfig encoder;
  NetVladConfig netvlad;
  Params params;
  int chunk_size_s = 7;

  int input_dim() const noexcept {
    return head == SpottingHead::transformer ? encoder.input_dim : netvlad.input_dim;
  }

  Checkpoint to_checkpoint(const std::vector<std::string>& vocabulary,
                           const std::optional<AdamState>& optimizer = std::nullopt) const;
  static SpottingModel from_checkpoint(const Checkpoint& checkpoint);
};

SpottingModel make_spotting_model(SpottingHead head, int input_dim, int chunk_size_s,
                                  std::uint64_t seed);
SpottingModel make_transformer_spotter(const EncoderConfig& config, int chunk_size_s,
                                       std::uint64_t seed);
SpottingModel make_netvlad_spotter(const NetVladConfig& config, int chunk_size_s,
                                   std::uint64_t seed);

/// Softmax cross-entropy against a target distribution. Accumulates the
/// parameter gradient into `grads` when given.
double spotting_loss(const SpottingModel& model, const MatrixD& x, const RowVectorD& target,
                     bool train_mode, Rng* rng, Params* grads);

/// 18-way class probabilities for one chunk (double precision).
RowVectorD spot_forward(const SpottingModel& model, const MatrixD& x);
RowVectorD spot_forward(const SpottingModel& model, const Chunk& chunk);

struct ChunkSplits {
  std::vector<Chunk> train;
  std::vector<Chunk> valid;
  std::vector<Chunk> test;
};

struct TrainHistory {
  std::vector<double> train_loss;
  std::vector<double> valid_loss;
  int selected_epoch = 0;  // 1-based
};

struct SpottingTrainResult {
  SpottingModel model;
  AdamState optimizer;
  TrainHistory history;
};

/// Regular mode trains on `train` and keeps the epoch with the lowest
/// validation loss; ultra mode pools all splits and keeps the last epoch.
/// Deterministic for a given spec.seed.
SpottingTrainResult train_spotting(const ChunkSplits& splits, const TrainSpec& spec,
                                   SpottingModel initial);
SpottingTrainResult train_spotting(const ChunkSplits& splits, const TrainSpec& spec,
                                   SpottingHead head);

/// T x 18 class probabilities: row c holds the output for the window of
/// chunk_size_s seconds centred on second c (stride 1 s, zero padding).
/// Runs in single precision.
MatrixD spot_score_series(const SpottingModel& model, const FeatureSequence& features,
                          int chunk_size_s);

/// Candidates are all (second, event class) with score >= threshold;
/// background is never emitted; nms_1d per class finishes the selection.
std::vector<SpotPrediction> select_spots(const MatrixD& scores, const std::string& game_id,
                                         int half, double threshold, int nms_window_s);

std::vector<SpotPrediction> spot_game(const SpottingModel& model, const FeatureSequence& features,
                                      int chunk_size_s, int nms_window_s, double threshold);

/// Finite-difference check of the full head under cross-entropy on a random
/// chunk of `length` rows with a random soft target. Dropout is off.
GradCheckReport spotting_grad_check(SpottingModel& model, int length, int trials, double h,
                                    std::uint64_t seed);

}  // namespace tdet
