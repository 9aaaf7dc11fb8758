#pragma once

// Test-only reference computations, independent of the library's log-space
// E-step.

#include <cmath>
#include <random>

#include "irtols/expectation.hpp"

namespace oracle {

struct Instance {
  irtols::PatternData data;
  std::vector<irtols::ItemParams> items;
  irtols::QuadratureGrid grid;
};

// Random items and responses; each item draws its own correct rate so the
// pattern distribution is not uniform.
inline Instance random_instance(std::mt19937_64& rng, int max_items, int max_nodes,
                                int max_persons = 200) {
  std::uniform_int_distribution<int> n_items(1, max_items);
  std::uniform_int_distribution<int> n_nodes(1, max_nodes);
  std::uniform_int_distribution<int> n_persons(1, max_persons);
  std::uniform_real_distribution<double> slope(0.2, 2.5), diff(-2.5, 2.5), rate(0.1, 0.9);

  Instance inst;
  const int items = n_items(rng);
  for (int j = 0; j < items; ++j)
    inst.items.push_back(irtols::ItemParams::from_difficulty(slope(rng), diff(rng)));
  std::vector<double> rates(items);
  for (auto& r : rates) r = rate(rng);
  irtols::ResponseMatrix m(n_persons(rng), irtols::ResponseRow(items));
  for (auto& row : m)
    for (int j = 0; j < items; ++j) row[j] = std::bernoulli_distribution(rates[j])(rng);
  inst.data = irtols::tabulate(m);
  inst.grid = irtols::normal_grid(n_nodes(rng));
  return inst;
}

// sum over all 2^I patterns of N_X log sum_t A_t prod_i P_i^X_i (1 - P_i)^(1 - X_i),
// evaluated with plain products.
inline double brute_force_loglik(const irtols::PatternData& data,
                                 const std::vector<irtols::ItemParams>& items,
                                 const irtols::QuadratureGrid& grid) {
  const int n_items = static_cast<int>(items.size());
  double total = 0.0;
  for (unsigned mask = 0; mask < (1u << n_items); ++mask) {
    irtols::ResponseRow x(n_items);
    for (int i = 0; i < n_items; ++i) x[i] = (mask >> (n_items - 1 - i)) & 1u;
    long freq = 0;
    for (int k = 0; k < data.n_patterns(); ++k)
      if (data.patterns[k] == x) freq = data.freqs[k];
    if (freq == 0) continue;
    double marginal = 0.0;
    for (int t = 0; t < grid.size(); ++t) {
      double prod = grid.weights[t];
      for (int i = 0; i < n_items; ++i) {
        const double p =
            1.0 / (1.0 + std::exp(-items[i].a() * (grid.nodes[t] - items[i].b())));
        prod *= x[i] ? p : 1.0 - p;
      }
      marginal += prod;
    }
    total += static_cast<double>(freq) * std::log(marginal);
  }
  return total;
}

}  // namespace oracle
