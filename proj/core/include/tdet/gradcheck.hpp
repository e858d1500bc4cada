#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "tdet/params.hpp"

namespace tdet {

/// Returns the loss at `params`; when `grads` is non-null it also
/// accumulates the analytic gradient into it (pre-zeroed by the caller).
using LossFunction = std::function<double(const Params& params, Params* grads)>;

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::size_t coordinates = 0;
  std::string worst_tensor;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

/// Compares analytic gradients against central differences on `trials`
/// coordinates drawn uniformly over all scalars, using
/// |a - n| / max(|a|, |n|, 1e-12). `params` is restored before returning.
GradCheckReport grad_check(Params& params, const LossFunction& loss, int trials, double h,
                           std::uint64_t seed);

}  // namespace tdet
