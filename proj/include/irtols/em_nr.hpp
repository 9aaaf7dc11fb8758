#pragma once

// Bock-Aitkin EM with a per-item Newton-Raphson M-step on the expected
// complete-data log-likelihood. Serves as the reference estimator.

#include <stdexcept>

#include "irtols/em_ols.hpp"

namespace irtols {

struct NRConfig {
  FitConfig base;
  int inner_max_iter = 50;
  double inner_tol = 1e-8;
  int step_halving_max = 20;

  static NRConfig defaults_for(ModelKind model);
  void validate() const;
};

class MonotonicityViolation : public std::runtime_error {
 public:
  MonotonicityViolation(int iteration, double before, double after);
  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

struct ItemScore {
  double s_a;
  double s_b;
};

// Gradient of the item's q1 term with respect to (a, b).
ItemScore item_score(const ItemParams& item, const Eigen::Ref<const Eigen::VectorXd>& n1,
                     const Eigen::Ref<const Eigen::VectorXd>& nt, const QuadratureGrid& grid);

struct NRStepResult {
  std::vector<ItemParams> params;
  std::vector<bool> gradient_fallback;
  std::vector<int> inner_iterations;
  // Score norms per inner iteration, recorded only for the item index given
  // to nr_mstep as trace_item.
  std::vector<double> score_norm_trace;
};

NRStepResult nr_mstep(std::span<const ItemParams> items, const ExpectedCounts& counts,
                      const QuadratureGrid& grid, const NRConfig& cfg, int trace_item = -1);

// Throws MonotonicityViolation when the observed log-likelihood drops by more
// than 1e-8 between iterations.
FitResult fit_nr(const PatternData& data, const NRConfig& cfg,
                 const EStepObserver& observer = {});

FitResult fit_nr_from(const PatternData& data, const NRConfig& cfg,
                      std::vector<ItemParams> start, const EStepObserver& observer = {});

}  // namespace irtols
