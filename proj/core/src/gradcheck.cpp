#include "tdet/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "tdet/rng.hpp"

namespace tdet {

GradCheckReport grad_check(Params& params, const LossFunction& loss, int trials, double h,
                           std::uint64_t seed) {
  Params analytic = params.zeros_like();
  loss(params, &analytic);

  std::vector<std::size_t> offsets;
  std::size_t total = 0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    offsets.push_back(total);
    total += static_cast<std::size_t>(params[i].size());
  }
  GradCheckReport report;
  if (total == 0) return report;

  Rng rng(seed);
  for (int trial = 0; trial < trials; ++trial) {
    const auto flat = static_cast<std::size_t>(rng.uniform_int(0, static_cast<long>(total) - 1));
    const auto tensor = static_cast<std::size_t>(
        std::upper_bound(offsets.begin(), offsets.end(), flat) - offsets.begin() - 1);
    const auto local = static_cast<Eigen::Index>(flat - offsets[tensor]);
    double& w = params[tensor].data()[local];
    const double saved = w;
    w = saved + h;
    params.bump_generation();
    const double up = loss(params, nullptr);
    w = saved - h;
    params.bump_generation();
    const double down = loss(params, nullptr);
    w = saved;
    params.bump_generation();

    const double numeric = (up - down) / (2.0 * h);
    const double a = analytic[tensor].data()[local];
    const double err = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-12});
    ++report.coordinates;
    if (err > report.max_relative_error || report.coordinates == 1) {
      report.max_relative_error = std::max(report.max_relative_error, err);
      if (err >= report.max_relative_error) {
        report.worst_tensor = params.name(tensor);
        report.worst_analytic = a;
        report.worst_numeric = numeric;
      }
    }
  }
  return report;
}

}  // namespace tdet
