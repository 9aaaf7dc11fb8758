#include "irtols/expectation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace irtols {

namespace {

void check_items(const PatternData& data, std::span<const ItemParams> items) {
  if (static_cast<int>(items.size()) != data.n_items) {
    throw std::invalid_argument("expected " + std::to_string(data.n_items) +
                                " item parameter sets, got " + std::to_string(items.size()));
  }
}

struct LogProbs {
  double log_p;
  double log_q;
};

// log P and log(1 - P) from the log-odds, each floored at log(kProbClamp).
// Equivalent to clamping P into [kProbClamp, 1 - kProbClamp] up to O(kProbClamp),
// without the cancellation of log1p(-P) near P = 1.
LogProbs log_probs(const ItemParams& item, double theta) {
  if (!std::isfinite(theta)) throw DomainError("non-finite ability value");
  static const double floor = std::log(kProbClamp);
  const double z = item.a() * (theta - item.b());
  const auto log_sigmoid = [](double v) {
    return v < 0 ? v - std::log1p(std::exp(v)) : -std::log1p(std::exp(-v));
  };
  return {std::max(log_sigmoid(z), floor), std::max(log_sigmoid(-z), floor)};
}

// log P(X | theta_t), patterns x nodes.
Matrix log_pattern_likelihoods(const PatternData& data, std::span<const ItemParams> items,
                               const QuadratureGrid& grid) {
  check_items(data, items);
  const int n_nodes = grid.size();
  Matrix log_p(data.n_items, n_nodes), log_q(data.n_items, n_nodes);
  for (int j = 0; j < data.n_items; ++j) {
    for (int t = 0; t < n_nodes; ++t) {
      const LogProbs lp = log_probs(items[j], grid.nodes[t]);
      log_p(j, t) = lp.log_p;
      log_q(j, t) = lp.log_q;
    }
  }
  Matrix out = Matrix::Zero(data.n_patterns(), n_nodes);
  for (int x = 0; x < data.n_patterns(); ++x) {
    const auto& pattern = data.patterns[x];
    for (int j = 0; j < data.n_items; ++j)
      out.row(x) += pattern[j] ? log_p.row(j) : log_q.row(j);
  }
  return out;
}

Eigen::VectorXd log_weights(const QuadratureGrid& grid) {
  Eigen::VectorXd out(grid.size());
  for (int t = 0; t < grid.size(); ++t) out[t] = std::log(grid.weights[t]);
  return out;
}

double log_sum_exp(const Eigen::Ref<const Eigen::RowVectorXd>& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

}  // namespace

double clamp_prob(double p) { return std::clamp(p, kProbClamp, 1.0 - kProbClamp); }

Matrix pattern_likelihoods(const PatternData& data, std::span<const ItemParams> items,
                           const QuadratureGrid& grid) {
  return log_pattern_likelihoods(data, items, grid).array().exp();
}

PosteriorTable posterior(const PatternData& data, std::span<const ItemParams> items,
                         const QuadratureGrid& grid) {
  Matrix joint = log_pattern_likelihoods(data, items, grid);
  joint.rowwise() += log_weights(grid).transpose();
  for (int x = 0; x < joint.rows(); ++x) {
    const double norm = log_sum_exp(joint.row(x));
    if (!std::isfinite(norm)) {
      throw std::underflow_error("posterior normalizer underflowed for pattern " +
                                 std::to_string(x));
    }
    joint.row(x) = (joint.row(x).array() - norm).exp();
  }
  return {std::move(joint)};
}

ExpectedCounts expected_counts(const PatternData& data, const PosteriorTable& post) {
  const auto n_nodes = post.values.cols();
  if (post.values.rows() != data.n_patterns())
    throw std::invalid_argument("posterior rows do not match pattern count");
  ExpectedCounts counts{Matrix::Zero(data.n_items, n_nodes), Eigen::VectorXd::Zero(n_nodes)};
  for (int x = 0; x < data.n_patterns(); ++x) {
    const Eigen::RowVectorXd mass = post.values.row(x) * static_cast<double>(data.freqs[x]);
    counts.nt += mass.transpose();
    for (int j = 0; j < data.n_items; ++j)
      if (data.patterns[x][j]) counts.n1.row(j) += mass;
  }
  return counts;
}

double observed_loglik(const PatternData& data, std::span<const ItemParams> items,
                       const QuadratureGrid& grid) {
  Matrix joint = log_pattern_likelihoods(data, items, grid);
  joint.rowwise() += log_weights(grid).transpose();
  double total = 0.0;
  for (int x = 0; x < joint.rows(); ++x)
    total += static_cast<double>(data.freqs[x]) * log_sum_exp(joint.row(x));
  return total;
}

double q1_item(const ItemParams& item, const Eigen::Ref<const Eigen::VectorXd>& n1,
               const Eigen::Ref<const Eigen::VectorXd>& nt, const QuadratureGrid& grid) {
  double total = 0.0;
  for (int t = 0; t < grid.size(); ++t) {
    const LogProbs lp = log_probs(item, grid.nodes[t]);
    total += n1[t] * lp.log_p + (nt[t] - n1[t]) * lp.log_q;
  }
  return total;
}

double q1(std::span<const ItemParams> items, const ExpectedCounts& counts,
          const QuadratureGrid& grid) {
  double total = 0.0;
  for (int j = 0; j < counts.n_items(); ++j)
    total += q1_item(items[j], counts.n1.row(j).transpose(), counts.nt, grid);
  return total;
}

Matrix phi_residuals(std::span<const ItemParams> items, const ExpectedCounts& counts,
                     const QuadratureGrid& grid) {
  Matrix phi(counts.n_items(), counts.n_nodes());
  for (int j = 0; j < counts.n_items(); ++j) {
    for (int t = 0; t < counts.n_nodes(); ++t) {
      const double z = items[j].a() * (grid.nodes[t] - items[j].b());
      const double p = std::max(logistic(z), kProbClamp);
      const double q = std::max(logistic(-z), kProbClamp);
      const double n1 = counts.n1(j, t);
      phi(j, t) = n1 / p - (counts.nt[t] - n1) / q;
    }
  }
  return phi;
}

double max_abs_phi(std::span<const ItemParams> items, const ExpectedCounts& counts,
                   const QuadratureGrid& grid) {
  return phi_residuals(items, counts, grid).cwiseAbs().maxCoeff();
}

EStep e_step(const PatternData& data, std::span<const ItemParams> items,
             const QuadratureGrid& grid) {
  Matrix joint = log_pattern_likelihoods(data, items, grid);
  joint.rowwise() += log_weights(grid).transpose();
  double loglik = 0.0;
  for (int x = 0; x < joint.rows(); ++x) {
    const double norm = log_sum_exp(joint.row(x));
    if (!std::isfinite(norm)) {
      throw std::underflow_error("posterior normalizer underflowed for pattern " +
                                 std::to_string(x));
    }
    loglik += static_cast<double>(data.freqs[x]) * norm;
    joint.row(x) = (joint.row(x).array() - norm).exp();
  }
  EStep out{PosteriorTable{std::move(joint)}, {}, loglik};
  out.counts = expected_counts(data, out.posterior);
  return out;
}

std::vector<double> membership_estimate(const ExpectedCounts& counts) {
  const double total = counts.nt.sum();
  if (!(total > 0.0)) throw std::invalid_argument("expected counts have no mass");
  std::vector<double> out(counts.n_nodes());
  for (int t = 0; t < counts.n_nodes(); ++t) out[t] = counts.nt[t] / total;
  return out;
}

}  // namespace irtols
