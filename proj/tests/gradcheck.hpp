#pragma once

// Central finite-difference gradient verification, independent of the
// backward-pass implementation it checks.

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  double analytic_at_worst = 0.0;
  double numeric_at_worst = 0.0;
};

// loss_fn must re-evaluate the loss from the (mutated) params each call.
inline GradCheckResult gradient_check(const std::function<double()>& loss_fn,
                                      std::span<double> params,
                                      std::span<const double> analytic,
                                      double step = 1e-5) {
  GradCheckResult result;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + step;
    const double fp = loss_fn();
    params[i] = saved - step;
    const double fm = loss_fn();
    params[i] = saved;
    const double numeric = (fp - fm) / (2.0 * step);
    const double denom =
        std::max({std::abs(analytic[i]), std::abs(numeric), 1e-5});
    const double rel = std::abs(analytic[i] - numeric) / denom;
    if (rel > result.max_rel_error) {
      result.max_rel_error = rel;
      result.worst_index = i;
      result.analytic_at_worst = analytic[i];
      result.numeric_at_worst = numeric;
    }
  }
  return result;
}
