#pragma once

// E-step quantities for the logistic IRT model on a fixed quadrature grid.

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "irtols/model.hpp"
#include "irtols/patterns.hpp"
#include "irtols/quadrature.hpp"

namespace irtols {

inline constexpr double kProbClamp = 1e-10;

using Matrix = Eigen::MatrixXd;

// Rows are patterns, columns quadrature nodes; each row sums to one.
struct PosteriorTable {
  Matrix values;
};

struct ExpectedCounts {
  Matrix n1;               // items x nodes, expected correct responses
  Eigen::VectorXd nt;      // nodes, expected persons

  int n_items() const { return static_cast<int>(n1.rows()); }
  int n_nodes() const { return static_cast<int>(nt.size()); }
};

double clamp_prob(double p);

// P(X | theta_t) for every pattern and node.
Matrix pattern_likelihoods(const PatternData& data, std::span<const ItemParams> items,
                           const QuadratureGrid& grid);

PosteriorTable posterior(const PatternData& data, std::span<const ItemParams> items,
                         const QuadratureGrid& grid);

ExpectedCounts expected_counts(const PatternData& data, const PosteriorTable& post);

// sum_X N_X log sum_t P(X | theta_t) A_t
double observed_loglik(const PatternData& data, std::span<const ItemParams> items,
                       const QuadratureGrid& grid);

// Expected complete-data log-likelihood restricted to the item terms.
double q1(std::span<const ItemParams> items, const ExpectedCounts& counts,
          const QuadratureGrid& grid);

// Contribution of a single item to q1.
double q1_item(const ItemParams& item, const Eigen::Ref<const Eigen::VectorXd>& n1,
               const Eigen::Ref<const Eigen::VectorXd>& nt, const QuadratureGrid& grid);

// phi_jt = N1_jt / P_j(theta_t) - N0_jt / (1 - P_j(theta_t)); zero at a stationary point.
Matrix phi_residuals(std::span<const ItemParams> items, const ExpectedCounts& counts,
                     const QuadratureGrid& grid);

double max_abs_phi(std::span<const ItemParams> items, const ExpectedCounts& counts,
                   const QuadratureGrid& grid);

struct EStep {
  PosteriorTable posterior;
  ExpectedCounts counts;
  double loglik = 0.0;  // observed-data log-likelihood at the same parameters
};

// Posterior, expected counts and observed log-likelihood from one pass.
EStep e_step(const PatternData& data, std::span<const ItemParams> items,
             const QuadratureGrid& grid);

// Posterior membership probability of each node, nt / sum(nt).
std::vector<double> membership_estimate(const ExpectedCounts& counts);

}  // namespace irtols
