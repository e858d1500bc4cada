#pragma once

#include <Eigen/Dense>

#include <cmath>

#include "tdet/error.hpp"

namespace tdet {

template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

using MatrixD = Matrix<double>;
using MatrixF = Matrix<float>;
using RowVectorD = RowVector<double>;

/// Sinusoidal position table: PE[t, 2i] = sin(t / 10000^(2i/d)),
/// PE[t, 2i+1] = cos(t / 10000^(2i/d)).
template <class Scalar>
Matrix<Scalar> positional_encoding(int length, int dim) {
  if (length < 1 || dim < 1 || dim % 2 != 0) {
    throw Error(ErrorKind::shape, "positional_encoding needs length >= 1 and an even width");
  }
  Matrix<Scalar> pe(length, dim);
  for (int i = 0; i < dim / 2; ++i) {
    const double freq = std::pow(10000.0, -2.0 * i / static_cast<double>(dim));
    for (int t = 0; t < length; ++t) {
      const double angle = t * freq;
      pe(t, 2 * i) = static_cast<Scalar>(std::sin(angle));
      pe(t, 2 * i + 1) = static_cast<Scalar>(std::cos(angle));
    }
  }
  return pe;
}

/// Row-wise softmax with max subtraction.
template <class Derived>
void softmax_rows_inplace(Eigen::MatrixBase<Derived>& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    const auto mx = row.maxCoeff();
    row = (row.array() - mx).exp().matrix();
    row /= row.sum();
  }
}

template <class Scalar>
Scalar sigmoid(Scalar z) {
  if (z >= 0) {
    return Scalar(1) / (Scalar(1) + std::exp(-z));
  }
  const Scalar e = std::exp(z);
  return e / (Scalar(1) + e);
}

inline constexpr double kLayerNormEps = 1e-5;

/// Normalized rows (before scale and shift) plus the per-row inverse std,
/// which is all the backward pass needs.
template <class Scalar>
struct LayerNormStats {
  Matrix<Scalar> normalized;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> inv_std;
};

template <class Scalar>
LayerNormStats<Scalar> layer_norm_rows(const Matrix<Scalar>& x) {
  LayerNormStats<Scalar> out{Matrix<Scalar>(x.rows(), x.cols()),
                             Eigen::Matrix<Scalar, Eigen::Dynamic, 1>(x.rows())};
  const Scalar n = static_cast<Scalar>(x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const Scalar mean = x.row(r).sum() / n;
    const auto centered = (x.row(r).array() - mean).eval();
    const Scalar var = centered.square().sum() / n;
    const Scalar inv = Scalar(1) / std::sqrt(var + static_cast<Scalar>(kLayerNormEps));
    out.normalized.row(r) = (centered * inv).matrix();
    out.inv_std(r) = inv;
  }
  return out;
}

}  // namespace tdet
