#pragma once

// EM estimation whose M-step is a closed-form least-squares fit of the
// node-wise log-odds of expected correct proportions on the quadrature nodes.

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "irtols/expectation.hpp"

namespace irtols {

inline constexpr double kProportionClamp = 1e-12;
inline constexpr double kDifficultyCap = 1e3;

class DegenerateNodeError : public std::runtime_error {
 public:
  explicit DegenerateNodeError(int node);
  int node() const { return node_; }

 private:
  int node_;
};

struct LatentResponseTable {
  Matrix y;                                   // items x nodes, log-odds
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> clamped;

  bool any_clamped() const { return clamped.any(); }
};

struct FitConfig {
  ModelKind model = ModelKind::TwoPL;
  int n_quads = 4;
  int max_iter = 500;
  double tol = 1e-4;
  double start_a = 1.0;
  double start_b = 0.0;
  double proportion_clamp = kProportionClamp;  // bounds n1/nt before taking log-odds

  // 2 quadrature points for the 1PL, 4 for the 2PL.
  static FitConfig defaults_for(ModelKind model);
  void validate() const;  // throws std::invalid_argument
};

struct MStepResult {
  std::vector<ItemParams> params;
  std::vector<bool> degenerate;  // slope below kMinSlope, difficulty capped
};

struct FitResult {
  std::vector<ItemParams> params;
  std::vector<bool> degenerate;
  std::vector<bool> clamped;        // some node proportion hit the clamp (OLS only)
  std::vector<bool> gradient_fallback;  // Hessian fallback used (NR only)
  int iterations = 0;
  bool converged = false;
  std::vector<double> loglik_trace;     // one entry per parameter set, iterations + 1
  std::vector<double> max_delta_trace;  // one entry per iteration
  std::vector<double> phi_max_trace;    // max |phi| at the start of each iteration, then at the end
  bool loglik_decreased = false;        // some step lowered the observed log-likelihood
};

// Called once per E-step with the iteration number (1-based), the posterior
// and the expected counts. Used by tests to audit intermediate quantities.
using EStepObserver =
    std::function<void(int iteration, const PosteriorTable&, const ExpectedCounts&)>;

LatentResponseTable latent_responses(const ExpectedCounts& counts,
                                     double clamp = kProportionClamp);

MStepResult ols_mstep(const LatentResponseTable& latent, const QuadratureGrid& grid,
                      ModelKind model);

FitResult fit(const PatternData& data, const FitConfig& cfg,
              const EStepObserver& observer = {});

// Same, starting from explicit parameters instead of cfg.start_a / cfg.start_b.
FitResult fit_from(const PatternData& data, const FitConfig& cfg,
                   std::vector<ItemParams> start, const EStepObserver& observer = {});

// Largest absolute change over all reported item parameters (b only for 1PL).
double max_param_change(std::span<const ItemParams> before, std::span<const ItemParams> after,
                        ModelKind model);

}  // namespace irtols
