#include "irtols/em_ols.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "em_loop.hpp"

namespace irtols {

DegenerateNodeError::DegenerateNodeError(int node)
    : std::runtime_error("quadrature node " + std::to_string(node) +
                         " carries no expected mass"),
      node_(node) {}

FitConfig FitConfig::defaults_for(ModelKind model) {
  FitConfig cfg;
  cfg.model = model;
  cfg.n_quads = model == ModelKind::OnePL ? 2 : 4;
  return cfg;
}

void FitConfig::validate() const {
  if (max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (n_quads < 1 || n_quads > kMaxQuadraturePoints) throw InvalidOrderError(n_quads);
  if (model == ModelKind::TwoPL && n_quads < 2)
    throw std::invalid_argument("the 2PL needs at least 2 quadrature points");
  if (!(proportion_clamp > 0.0 && proportion_clamp < 0.5))
    throw std::invalid_argument("proportion_clamp must lie in (0, 0.5)");
}

LatentResponseTable latent_responses(const ExpectedCounts& counts, double clamp) {
  const int n_items = counts.n_items();
  const int n_nodes = counts.n_nodes();
  LatentResponseTable out{Matrix(n_items, n_nodes),
                          Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(
                              n_items, n_nodes, false)};
  for (int t = 0; t < n_nodes; ++t) {
    if (!(counts.nt[t] > 0.0)) throw DegenerateNodeError(t);
    for (int j = 0; j < n_items; ++j) {
      const double raw = counts.n1(j, t) / counts.nt[t];
      const double p = std::clamp(raw, clamp, 1.0 - clamp);
      out.clamped(j, t) = p != raw;
      out.y(j, t) = std::log(p / (1.0 - p));
    }
  }
  return out;
}

MStepResult ols_mstep(const LatentResponseTable& latent, const QuadratureGrid& grid,
                      ModelKind model) {
  const int n_items = static_cast<int>(latent.y.rows());
  const int n_nodes = grid.size();
  if (latent.y.cols() != n_nodes)
    throw std::invalid_argument("latent responses do not match the quadrature grid");
  if (model == ModelKind::TwoPL && n_nodes < 2)
    throw std::invalid_argument("the 2PL needs at least 2 quadrature points");

  const Eigen::Map<const Eigen::VectorXd> theta(grid.nodes.data(), n_nodes);
  const double theta_mean = theta.mean();
  const Eigen::VectorXd centered = theta.array() - theta_mean;
  const double sxx = centered.squaredNorm();

  MStepResult out;
  out.params.reserve(n_items);
  out.degenerate.assign(n_items, false);
  for (int j = 0; j < n_items; ++j) {
    const double y_mean = latent.y.row(j).mean();
    if (model == ModelKind::OnePL) {
      out.params.push_back(ItemParams::from_slope_threshold(1.0, y_mean - theta_mean));
      continue;
    }
    const double slope = centered.dot(latent.y.row(j).transpose()) / sxx;
    const double threshold = y_mean - slope * theta_mean;
    if (std::abs(slope) < kMinSlope) {
      out.degenerate[j] = true;
      out.params.push_back(
          ItemParams::from_difficulty(slope, threshold >= 0.0 ? kDifficultyCap : -kDifficultyCap));
    } else {
      out.params.push_back(ItemParams::from_slope_threshold(slope, threshold));
    }
  }
  return out;
}

double max_param_change(std::span<const ItemParams> before, std::span<const ItemParams> after,
                        ModelKind model) {
  double delta = 0.0;
  for (std::size_t j = 0; j < before.size(); ++j) {
    delta = std::max(delta, std::abs(after[j].b() - before[j].b()));
    if (model == ModelKind::TwoPL) delta = std::max(delta, std::abs(after[j].a() - before[j].a()));
  }
  return delta;
}

FitResult fit(const PatternData& data, const FitConfig& cfg, const EStepObserver& observer) {
  const double start_a = cfg.model == ModelKind::OnePL ? 1.0 : cfg.start_a;
  return fit_from(data, cfg,
                  std::vector<ItemParams>(data.n_items,
                                          ItemParams::from_difficulty(start_a, cfg.start_b)),
                  observer);
}

FitResult fit_from(const PatternData& data, const FitConfig& cfg, std::vector<ItemParams> start,
                   const EStepObserver& observer) {
  return detail::run_em(
      data, cfg, std::move(start), observer,
      [&](std::span<const ItemParams>, const ExpectedCounts& counts, const QuadratureGrid& grid) {
        const LatentResponseTable latent = latent_responses(counts, cfg.proportion_clamp);
        MStepResult m = ols_mstep(latent, grid, cfg.model);
        detail::MStepOutcome out{std::move(m.params), std::move(m.degenerate), {}, {}};
        out.clamped.resize(latent.y.rows());
        for (Eigen::Index j = 0; j < latent.y.rows(); ++j) out.clamped[j] = latent.clamped.row(j).any();
        out.gradient_fallback.assign(latent.y.rows(), false);
        return out;
      });
}

}  // namespace irtols
