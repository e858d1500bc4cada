#include "tdet/adam.hpp"

#include <cmath>

namespace tdet {

void adam_step(Params& params, const Params& grads, AdamState& state, const AdamConfig& cfg) {
  if (!grads.same_shape(params) || !state.m.same_shape(params) || !state.v.same_shape(params)) {
    throw Error(ErrorKind::shape, "adam_step: gradient or moment shapes differ from parameters");
  }
  if (!grads.all_finite()) throw Error(ErrorKind::numeric, "adam_step: non-finite gradient");
  ++state.step;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& m = state.m[i];
    auto& v = state.v[i];
    const auto& g = grads[i];
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.cwiseProduct(g);
    params[i].array() -= cfg.lr * (m.array() / c1) / ((v.array() / c2).sqrt() + cfg.eps);
  }
  params.bump_generation();
}

}  // namespace tdet
