#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tdet/tensor.hpp"

namespace tdet {

template <class Scalar>
struct NamedTensor {
  std::string name;
  Matrix<Scalar> value;
};

/// Ordered collection of named weight tensors. Optimizers, gradient checks
/// and checkpoints treat a model purely as this list.
template <class Scalar>
class ParamSet {
 public:
  std::size_t add(std::string name, Eigen::Index rows, Eigen::Index cols) {
    tensors_.push_back({std::move(name), Matrix<Scalar>::Zero(rows, cols)});
    return tensors_.size() - 1;
  }
  std::size_t add(std::string name, Matrix<Scalar> value) {
    tensors_.push_back({std::move(name), std::move(value)});
    return tensors_.size() - 1;
  }

  std::size_t size() const noexcept { return tensors_.size(); }
  bool empty() const noexcept { return tensors_.empty(); }
  Matrix<Scalar>& operator[](std::size_t i) { return tensors_[i].value; }
  const Matrix<Scalar>& operator[](std::size_t i) const { return tensors_[i].value; }
  const std::string& name(std::size_t i) const { return tensors_[i].name; }
  const std::vector<NamedTensor<Scalar>>& tensors() const noexcept { return tensors_; }

  std::size_t scalar_count() const {
    std::size_t n = 0;
    for (const auto& t : tensors_) n += static_cast<std::size_t>(t.value.size());
    return n;
  }

  ParamSet zeros_like() const {
    ParamSet out;
    for (const auto& t : tensors_) out.add(t.name, t.value.rows(), t.value.cols());
    return out;
  }

  void set_zero() {
    for (auto& t : tensors_) t.value.setZero();
  }

  template <class Other>
  ParamSet<Other> cast() const {
    ParamSet<Other> out;
    for (const auto& t : tensors_) out.add(t.name, t.value.template cast<Other>());
    out.set_generation(generation_);
    return out;
  }

  bool same_shape(const ParamSet& other) const {
    if (other.size() != size()) return false;
    for (std::size_t i = 0; i < size(); ++i) {
      if (tensors_[i].value.rows() != other[i].rows() || tensors_[i].value.cols() != other[i].cols()) {
        return false;
      }
    }
    return true;
  }

  ParamSet& operator+=(const ParamSet& other) {
    for (std::size_t i = 0; i < size(); ++i) tensors_[i].value += other[i];
    return *this;
  }
  ParamSet& operator*=(Scalar s) {
    for (auto& t : tensors_) t.value *= s;
    return *this;
  }

  bool all_finite() const {
    for (const auto& t : tensors_) {
      if (!t.value.allFinite()) return false;
    }
    return true;
  }

  /// Bumped by every in-place update; forward caches record it so a stale
  /// cache is detectable.
  std::uint64_t generation() const noexcept { return generation_; }
  void bump_generation() noexcept { ++generation_; }
  void set_generation(std::uint64_t g) noexcept { generation_ = g; }

 private:
  std::vector<NamedTensor<Scalar>> tensors_;
  std::uint64_t generation_ = 0;
};

using Params = ParamSet<double>;

/// Uniform(-a, a) with a = sqrt(6 / (fan_in + fan_out)).
class Rng;
void xavier_uniform(MatrixD& w, Rng& rng);

}  // namespace tdet
