#include "irtols/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

namespace irtols {

InvalidOrderError::InvalidOrderError(int order)
    : std::invalid_argument("quadrature order must be in [1, " +
                            std::to_string(kMaxQuadraturePoints) + "], got " +
                            std::to_string(order)),
      order_(order) {}

namespace {

struct Recurrence {
  double p;       // orthonormal p_T(x)
  double p_prev;  // orthonormal p_{T-1}(x)
  double sum_sq;  // sum_{k<T} p_k(x)^2
};

// Orthonormal Hermite polynomials w.r.t. exp(-x^2):
// p_0 = pi^{-1/4}, p_{k+1} = x sqrt(2/(k+1)) p_k - sqrt(k/(k+1)) p_{k-1}.
Recurrence evaluate(int order, double x) {
  double prev = 0.0;
  double cur = std::pow(std::numbers::pi, -0.25);
  double sum_sq = 0.0;
  for (int k = 0; k < order; ++k) {
    sum_sq += cur * cur;
    const double next = x * std::sqrt(2.0 / (k + 1)) * cur - std::sqrt(double(k) / (k + 1)) * prev;
    prev = cur;
    cur = next;
  }
  return {cur, prev, sum_sq};
}

}  // namespace

HermiteRule hermite_rule(int order) {
  if (order < 1 || order > kMaxQuadraturePoints) throw InvalidOrderError(order);

  const auto n = static_cast<Eigen::Index>(order);
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd offdiag(std::max<Eigen::Index>(n - 1, 0));
  for (Eigen::Index k = 0; k + 1 < n; ++k) offdiag[k] = std::sqrt(double(k + 1) / 2.0);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, offdiag, Eigen::EigenvaluesOnly);
  Eigen::VectorXd roots = solver.eigenvalues();

  // p_T' = sqrt(2T) p_{T-1}
  for (Eigen::Index t = 0; t < n; ++t) {
    double x = roots[t];
    for (int it = 0; it < 3; ++it) {
      const Recurrence r = evaluate(order, x);
      const double deriv = std::sqrt(2.0 * order) * r.p_prev;
      if (deriv == 0.0) break;
      x -= r.p / deriv;
    }
    roots[t] = x;
  }

  HermiteRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (int t = 0; t < order; ++t) {
    // Mirror the upper half so the rule is exactly symmetric.
    const int mirror = order - 1 - t;
    const double x = t < mirror ? -roots[mirror] : (t == mirror ? 0.0 : roots[t]);
    rule.nodes[t] = x;
    rule.weights[t] = 1.0 / evaluate(order, x).sum_sq;
  }
  return rule;
}

QuadratureGrid normal_grid(int order) {
  HermiteRule rule = hermite_rule(order);
  QuadratureGrid grid;
  grid.nodes.resize(order);
  grid.weights.resize(order);
  double total = 0.0;
  for (int t = 0; t < order; ++t) {
    grid.nodes[t] = rule.nodes[t] * std::numbers::sqrt2;
    grid.weights[t] = rule.weights[t] / std::sqrt(std::numbers::pi);
    total += grid.weights[t];
  }
  for (double& w : grid.weights) w /= total;
  return grid;
}

}  // namespace irtols
