#pragma once

// EM driver shared by the OLS and Newton-Raphson estimators.

#include "irtols/em_ols.hpp"

namespace irtols::detail {

struct MStepOutcome {
  std::vector<ItemParams> params;
  std::vector<bool> degenerate;
  std::vector<bool> clamped;
  std::vector<bool> gradient_fallback;
};

template <typename MStep>
FitResult run_em(const PatternData& data, const FitConfig& cfg, std::vector<ItemParams> start,
                 const EStepObserver& observer, MStep&& mstep) {
  cfg.validate();
  if (static_cast<int>(start.size()) != data.n_items)
    throw std::invalid_argument("starting values do not match the item count");
  const QuadratureGrid grid = normal_grid(cfg.n_quads);

  FitResult result;
  result.params = std::move(start);
  result.degenerate.assign(data.n_items, false);
  result.clamped.assign(data.n_items, false);
  result.gradient_fallback.assign(data.n_items, false);

  EStep estep = e_step(data, result.params, grid);
  result.loglik_trace.push_back(estep.loglik);

  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    if (observer) observer(iter, estep.posterior, estep.counts);
    result.phi_max_trace.push_back(max_abs_phi(result.params, estep.counts, grid));

    MStepOutcome next = mstep(result.params, estep.counts, grid);
    const double delta = max_param_change(result.params, next.params, cfg.model);

    result.params = std::move(next.params);
    result.degenerate = std::move(next.degenerate);
    result.clamped = std::move(next.clamped);
    for (int j = 0; j < data.n_items; ++j)
      if (next.gradient_fallback[j]) result.gradient_fallback[j] = true;
    result.iterations = iter;
    result.max_delta_trace.push_back(delta);

    estep = e_step(data, result.params, grid);
    if (estep.loglik < result.loglik_trace.back() - 1e-8) result.loglik_decreased = true;
    result.loglik_trace.push_back(estep.loglik);

    if (delta < cfg.tol) {
      result.converged = true;
      break;
    }
  }
  result.phi_max_trace.push_back(max_abs_phi(result.params, estep.counts, grid));
  return result;
}

}  // namespace irtols::detail
