#pragma once

#include "tdet/params.hpp"

namespace tdet {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  Params m;
  Params v;
  long step = 0;

  static AdamState for_params(const Params& params) {
    return {params.zeros_like(), params.zeros_like(), 0};
  }
};

/// One bias-corrected adaptive-moment update; increments state.step first,
/// so the first call uses step 1. Throws a numeric error on non-finite
/// gradients before touching anything.
void adam_step(Params& params, const Params& grads, AdamState& state, const AdamConfig& config);

}  // namespace tdet
