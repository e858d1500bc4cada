#pragma once

#include "tdet/params.hpp"
#include "tdet/rng.hpp"

namespace tdet {

/// Temporally-aware VLAD pooling: soft-assignment VLAD over the first and
/// second half of a chunk separately, each intra-normalized per cluster,
/// concatenated, L2-normalized and classified by a linear layer.
struct NetVladConfig {
  int input_dim = 0;
  int clusters = 64;
  int output_dim = 18;

  void validate() const;
  int descriptor_dim() const noexcept { return 2 * clusters * input_dim; }
  friend bool operator==(const NetVladConfig&, const NetVladConfig&) = default;
};

struct NetVladLayout {
  static constexpr std::size_t centers = 0;     // K x D
  static constexpr std::size_t assign_w = 1;    // D x K
  static constexpr std::size_t assign_b = 2;    // 1 x K
  static constexpr std::size_t classify_w = 3;  // 2KD x out
  static constexpr std::size_t classify_b = 4;  // 1 x out
};

Params make_netvlad_params(const NetVladConfig& config);
Params init_netvlad_params(const NetVladConfig& config, Rng& rng);

struct NetVladCache {
  struct Half {
    MatrixD x;
    MatrixD assign;     // n x K soft assignment
    MatrixD vlad;       // K x D intra-normalized residual sums
    Eigen::VectorXd norms;
  };
  NetVladConfig config;
  std::uint64_t generation = 0;
  bool valid = false;
  Half past, future;
  RowVectorD descriptor;
  double norm = 0.0;
};

/// Final L2-normalized 2KD descriptor. Throws a split error when the chunk
/// length is odd or below 2.
template <class Scalar>
RowVector<Scalar> netvlad_descriptor(const ParamSet<Scalar>& params, const NetVladConfig& config,
                                     const Matrix<Scalar>& x, NetVladCache* cache = nullptr);

template <class Scalar>
RowVector<Scalar> netvlad_forward(const ParamSet<Scalar>& params, const NetVladConfig& config,
                                  const Matrix<Scalar>& x, NetVladCache* cache = nullptr);

void netvlad_backward(const Params& params, const NetVladCache& cache, const RowVectorD& upstream,
                      Params& grads);

}  // namespace tdet
