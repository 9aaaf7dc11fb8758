#include "irtols/em_nr.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "em_loop.hpp"

namespace irtols {

namespace {

constexpr double kHessianStep = 1e-5;
constexpr double kFallbackStep = 0.1;

// Newton iterates live in slope/threshold coordinates, where each item's q1
// term is concave.
struct Point {
  double a;
  double tau;
};

std::optional<ItemParams> to_params(Point p) {
  if (!std::isfinite(p.a) || !std::isfinite(p.tau) || std::abs(p.a) < kMinSlope)
    return std::nullopt;
  return ItemParams::from_slope_threshold(p.a, p.tau);
}

// Chain rule from (a, b) to (a, tau) with b = -tau / a.
ItemScore to_slope_threshold(const ItemScore& s, const ItemParams& p) {
  return {s.s_a - s.s_b * p.b() / p.a(), -s.s_b / p.a()};
}

}  // namespace

NRConfig NRConfig::defaults_for(ModelKind model) {
  NRConfig cfg;
  cfg.base = FitConfig::defaults_for(model);
  return cfg;
}

void NRConfig::validate() const {
  base.validate();
  if (inner_max_iter < 1) throw std::invalid_argument("inner_max_iter must be at least 1");
  if (!(inner_tol > 0.0)) throw std::invalid_argument("inner_tol must be positive");
  if (step_halving_max < 0) throw std::invalid_argument("step_halving_max must be non-negative");
}

MonotonicityViolation::MonotonicityViolation(int iteration, double before, double after)
    : std::runtime_error("observed log-likelihood decreased at iteration " +
                         std::to_string(iteration) + ": " + std::to_string(before) + " -> " +
                         std::to_string(after)),
      iteration_(iteration) {}

ItemScore item_score(const ItemParams& item, const Eigen::Ref<const Eigen::VectorXd>& n1,
                     const Eigen::Ref<const Eigen::VectorXd>& nt, const QuadratureGrid& grid) {
  double s_a = 0.0;
  double resid_sum = 0.0;
  for (int t = 0; t < grid.size(); ++t) {
    const double resid = n1[t] - nt[t] * irf(item, grid.nodes[t]);
    s_a += (grid.nodes[t] - item.b()) * resid;
    resid_sum += resid;
  }
  return {s_a, -item.a() * resid_sum};
}

NRStepResult nr_mstep(std::span<const ItemParams> items, const ExpectedCounts& counts,
                      const QuadratureGrid& grid, const NRConfig& cfg, int trace_item) {
  const bool two_pl = cfg.base.model == ModelKind::TwoPL;
  NRStepResult out;
  out.params.reserve(items.size());
  out.gradient_fallback.assign(items.size(), false);
  out.inner_iterations.assign(items.size(), 0);

  for (int j = 0; j < static_cast<int>(items.size()); ++j) {
    const Eigen::VectorXd n1 = counts.n1.row(j).transpose();
    // Gradient in (a, tau); the 1PL keeps a fixed at one.
    const auto score = [&](Point p) -> ItemScore {
      const ItemParams params = *to_params(p);
      return to_slope_threshold(item_score(params, n1, counts.nt, grid), params);
    };
    const auto objective = [&](Point p) {
      const auto params = to_params(p);
      return params ? q1_item(*params, n1, counts.nt, grid)
                    : -std::numeric_limits<double>::infinity();
    };

    const double start_a = two_pl ? items[j].a() : 1.0;
    Point cur{start_a, -start_a * items[j].b()};
    double cur_q = objective(cur);

    for (int k = 0; k < cfg.inner_max_iter && std::isfinite(cur_q); ++k) {
      const ItemScore s = score(cur);
      const double norm = two_pl ? std::hypot(s.s_a, s.s_b) : std::abs(s.s_b);
      if (j == trace_item) out.score_norm_trace.push_back(norm);
      if (norm < cfg.inner_tol) break;
      out.inner_iterations[j] = k + 1;

      Point dir{0.0, 0.0};
      bool fallback = false;
      // Central differences of the analytic score near a = 0 would cross the
      // degenerate slope; the step shrinks with |a| there.
      const double step_a = std::min(kHessianStep, 0.5 * std::abs(cur.a));
      if (two_pl) {
        const ItemScore sa_hi = score({cur.a + step_a, cur.tau});
        const ItemScore sa_lo = score({cur.a - step_a, cur.tau});
        const ItemScore st_hi = score({cur.a, cur.tau + kHessianStep});
        const ItemScore st_lo = score({cur.a, cur.tau - kHessianStep});
        const double h_aa = (sa_hi.s_a - sa_lo.s_a) / (2 * step_a);
        const double h_tt = (st_hi.s_b - st_lo.s_b) / (2 * kHessianStep);
        const double h_at = 0.5 * ((sa_hi.s_b - sa_lo.s_b) / (2 * step_a) +
                                   (st_hi.s_a - st_lo.s_a) / (2 * kHessianStep));
        const double det = h_aa * h_tt - h_at * h_at;
        // Newton only when the Hessian is negative definite.
        if (h_aa < 0.0 && det > 1e-12 * (h_aa * h_aa + h_tt * h_tt)) {
          dir.a = -(h_tt * s.s_a - h_at * s.s_b) / det;
          dir.tau = -(-h_at * s.s_a + h_aa * s.s_b) / det;
        } else {
          fallback = true;
        }
      } else {
        const double h_tt = (score({1.0, cur.tau + kHessianStep}).s_b -
                             score({1.0, cur.tau - kHessianStep}).s_b) /
                            (2 * kHessianStep);
        if (h_tt < 0.0) {
          dir.tau = -s.s_b / h_tt;
        } else {
          fallback = true;
        }
      }
      if (fallback) {
        out.gradient_fallback[j] = true;
        dir = {two_pl ? kFallbackStep * s.s_a : 0.0, kFallbackStep * s.s_b};
      }

      bool accepted = false;
      double scale = 1.0;
      for (int h = 0; h <= cfg.step_halving_max; ++h, scale *= 0.5) {
        const Point cand{cur.a + scale * dir.a, cur.tau + scale * dir.tau};
        const double cand_q = objective(cand);
        // Steps whose loss is at the rounding level of q1 are not rejected.
        if (cand_q >= cur_q - 1e-14 * std::max(1.0, std::abs(cur_q))) {
          accepted = true;
          cur = cand;
          cur_q = cand_q;
          break;
        }
      }
      if (!accepted) break;
    }
    // An unusable start (|a| below kMinSlope) is returned unchanged.
    out.params.push_back(std::isfinite(cur_q) ? *to_params(cur) : items[j]);
  }
  return out;
}

FitResult fit_nr(const PatternData& data, const NRConfig& cfg, const EStepObserver& observer) {
  const double start_a = cfg.base.model == ModelKind::OnePL ? 1.0 : cfg.base.start_a;
  return fit_nr_from(
      data, cfg,
      std::vector<ItemParams>(data.n_items, ItemParams::from_difficulty(start_a, cfg.base.start_b)),
      observer);
}

FitResult fit_nr_from(const PatternData& data, const NRConfig& cfg, std::vector<ItemParams> start,
                      const EStepObserver& observer) {
  cfg.validate();
  FitResult result = detail::run_em(
      data, cfg.base, std::move(start), observer,
      [&](std::span<const ItemParams> items, const ExpectedCounts& counts,
          const QuadratureGrid& grid) {
        NRStepResult m = nr_mstep(items, counts, grid, cfg);
        const auto n = m.params.size();
        return detail::MStepOutcome{std::move(m.params), std::vector<bool>(n, false),
                                    std::vector<bool>(n, false), std::move(m.gradient_fallback)};
      });
  for (std::size_t k = 1; k < result.loglik_trace.size(); ++k) {
    if (result.loglik_trace[k] < result.loglik_trace[k - 1] - 1e-8)
      throw MonotonicityViolation(static_cast<int>(k), result.loglik_trace[k - 1],
                                  result.loglik_trace[k]);
  }
  return result;
}

}  // namespace irtols
