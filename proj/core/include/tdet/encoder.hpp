#pragma once

#include <span>
#include <vector>

#include "tdet/params.hpp"
#include "tdet/rng.hpp"

namespace tdet {

struct EncoderConfig {
  int num_layers = 3;
  int num_heads = 4;
  int model_dim = 64;
  int hidden_dim = 256;
  int input_dim = 0;
  int output_dim = 18;
  double dropout_p = 0.1;
  /// Learned segment embeddings added after the input projection; 0 disables.
  int num_segments = 0;


  void validate() const;
  friend bool operator==(const EncoderConfig&, const EncoderConfig&) = default;
};

/// Indices of each tensor inside the encoder's ParamSet.
struct EncoderLayout {
  struct Layer {
    std::size_t q_w, q_b, k_w, v_w, v_b, o_w, o_b;
    std::size_t ln1_g, ln1_b;
    std::size_t ff1_w, ff1_b, ff2_w, ff2_b;
    std::size_t ln2_g, ln2_b;
  };
  std::size_t in_w = 0, in_b = 0;
  std::size_t segment = 0;
  bool has_segment = false;
  std::vector<Layer> layers;
  std::size_t out_w = 0, out_b = 0;
};

/// Builds the tensor list for `config` in a fixed order; tensors are zeroed.
/// The key projection carries no bias: softmax is invariant to it, so its
/// gradient is identically zero.
Params make_encoder_params(const EncoderConfig& config, EncoderLayout* layout = nullptr);
EncoderLayout encoder_layout(const EncoderConfig& config);
/// Xavier weights, zero biases, unit layer-norm scales.
Params init_encoder_params(const EncoderConfig& config, Rng& rng);

/// Activation record of one double-precision forward pass.
struct EncoderCache {
  struct Layer {
    MatrixD input;
    MatrixD q, k, v;
    std::vector<MatrixD> attn;  // per head, T x T
    MatrixD context;            // concatenated heads before the output projection
    MatrixD attn_mask;          // dropout scale mask, empty when unused
    LayerNormStats<double> ln1;
    MatrixD h1;
    MatrixD ff_pre;             // before ReLU
    MatrixD ff_act;
    MatrixD ff_mask;
    LayerNormStats<double> ln2;
  };
  EncoderConfig config;
  std::uint64_t generation = 0;
  bool valid = false;
  MatrixD x;
  std::vector<int> segments;
  MatrixD embed_mask;
  std::vector<Layer> layers;
  RowVectorD pooled;
};

/// input projection -> + positional encoding (+ segment embedding) ->
/// num_layers x post-norm [self-attention, feed-forward] -> mean over time ->
/// output projection. Returns 1 x output_dim logits.
///
/// Dropout is active only with train_mode and a generator. The cache is
/// filled only for the double instantiation.
template <class Scalar>
RowVector<Scalar> encoder_forward(const ParamSet<Scalar>& params, const EncoderConfig& config,
                                  const Matrix<Scalar>& x, std::span<const int> segments = {},
                                  bool train_mode = false, Rng* rng = nullptr,
                                  EncoderCache* cache = nullptr);

/// Accumulates d(loss)/d(theta) into `grads` given d(loss)/d(logits).
void encoder_backward(const Params& params, const EncoderCache& cache,
                      const RowVectorD& upstream, Params& grads);

/// Convenience overload returning fresh gradients.
Params encoder_backward(const Params& params, const EncoderCache& cache,
                        const RowVectorD& upstream);

}  // namespace tdet
