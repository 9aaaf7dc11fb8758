#include <cmath>
#include <numbers>

#include <doctest.h>

#include "irtols/quadrature.hpp"

using namespace irtols;

namespace {
const double kSqrtPi = std::sqrt(std::numbers::pi);
}

TEST_CASE("hermite rule matches closed-form roots for small orders") {
  const HermiteRule one = hermite_rule(1);
  REQUIRE(one.nodes.size() == 1);
  CHECK(one.nodes[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(std::abs(one.weights[0] - kSqrtPi) < 1e-12);

  // H2(x) = 4x^2 - 2
  const HermiteRule two = hermite_rule(2);
  CHECK(std::abs(two.nodes[0] + 1.0 / std::sqrt(2.0)) < 1e-14);
  CHECK(std::abs(two.nodes[1] - 1.0 / std::sqrt(2.0)) < 1e-14);
  CHECK(std::abs(two.weights[0] - kSqrtPi / 2) < 1e-13);
  CHECK(std::abs(two.weights[1] - kSqrtPi / 2) < 1e-13);

  // H3(x) = 8x^3 - 12x
  const HermiteRule three = hermite_rule(3);
  CHECK(std::abs(three.nodes[0] + std::sqrt(1.5)) < 1e-14);
  CHECK(three.nodes[1] == 0.0);
  CHECK(std::abs(three.nodes[2] - std::sqrt(1.5)) < 1e-14);
  CHECK(std::abs(three.weights[0] - kSqrtPi / 6) < 1e-13);
  CHECK(std::abs(three.weights[1] - 2 * kSqrtPi / 3) < 1e-13);
  CHECK(std::abs(three.weights[2] - kSqrtPi / 6) < 1e-13);
}

TEST_CASE("hermite rule of order 5 matches the quadratic-in-x^2 root formula") {
  // H5(x) = 32x^5 - 160x^3 + 120x, so x^2 = (5 +- sqrt(10)) / 2.
  const HermiteRule rule = hermite_rule(5);
  const double inner = std::sqrt((5 - std::sqrt(10.0)) / 2);
  const double outer = std::sqrt((5 + std::sqrt(10.0)) / 2);
  CHECK(std::abs(rule.nodes[0] + outer) < 1e-13);
  CHECK(std::abs(rule.nodes[1] + inner) < 1e-13);
  CHECK(rule.nodes[2] == 0.0);
  CHECK(std::abs(rule.nodes[3] - inner) < 1e-13);
  CHECK(std::abs(rule.nodes[4] - outer) < 1e-13);
  // w = 2^(n-1) n! sqrt(pi) / (n^2 H_{n-1}(x)^2), H4(x) = 16x^4 - 48x^2 + 12
  for (int t = 0; t < 5; ++t) {
    const double x = rule.nodes[t];
    const double h4 = 16 * std::pow(x, 4) - 48 * x * x + 12;
    const double w = 16.0 * 120.0 * kSqrtPi / (25.0 * h4 * h4);
    CHECK(std::abs(rule.weights[t] - w) < 1e-13);
  }
}

TEST_CASE("invalid orders are rejected") {
  CHECK_THROWS_AS(hermite_rule(0), InvalidOrderError);
  CHECK_THROWS_AS(hermite_rule(51), InvalidOrderError);
  CHECK_THROWS_AS(normal_grid(-3), InvalidOrderError);
  try {
    normal_grid(0);
  } catch (const InvalidOrderError& e) {
    CHECK(e.order() == 0);
  }
}

TEST_CASE("normal grid rescales the hermite rule") {
  const QuadratureGrid one = normal_grid(1);
  CHECK(one.nodes[0] == 0.0);
  CHECK(one.weights[0] == doctest::Approx(1.0).epsilon(1e-15));

  const QuadratureGrid two = normal_grid(2);
  CHECK(std::abs(two.nodes[0] + 1.0) < 1e-12);
  CHECK(std::abs(two.nodes[1] - 1.0) < 1e-12);
  CHECK(std::abs(two.weights[0] - 0.5) < 1e-12);
  CHECK(std::abs(two.weights[1] - 0.5) < 1e-12);

  const QuadratureGrid three = normal_grid(3);
  CHECK(std::abs(three.nodes[0] + std::sqrt(3.0)) < 1e-12);
  CHECK(three.nodes[1] == 0.0);
  CHECK(std::abs(three.nodes[2] - std::sqrt(3.0)) < 1e-12);
  CHECK(std::abs(three.weights[0] - 1.0 / 6) < 1e-12);
  CHECK(std::abs(three.weights[1] - 2.0 / 3) < 1e-12);
  CHECK(std::abs(three.weights[2] - 1.0 / 6) < 1e-12);
}

TEST_CASE("grid invariants and normal moments hold for every order") {
  for (int order = 1; order <= kMaxQuadraturePoints; ++order) {
    CAPTURE(order);
    const HermiteRule raw = hermite_rule(order);
    double raw_sum = 0;
    for (double w : raw.weights) raw_sum += w;
    CHECK(std::abs(raw_sum - kSqrtPi) < 1e-10);

    const QuadratureGrid g = normal_grid(order);
    REQUIRE(g.size() == order);
    REQUIRE(g.weights.size() == g.nodes.size());
    double m0 = 0, m1 = 0, m2 = 0, m4 = 0;
    for (int t = 0; t < order; ++t) {
      if (t > 0) CHECK(g.nodes[t] > g.nodes[t - 1]);
      CHECK(std::abs(g.nodes[t] + g.nodes[order - 1 - t]) < 1e-12);
      CHECK(g.weights[t] > 0.0);
      const double x = g.nodes[t];
      m0 += g.weights[t];
      m1 += g.weights[t] * x;
      m2 += g.weights[t] * x * x;
      m4 += g.weights[t] * x * x * x * x;
    }
    CHECK(std::abs(m0 - 1.0) < 1e-12);
    CHECK(std::abs(m1) < 1e-12);
    if (order >= 2) CHECK(std::abs(m2 - 1.0) < 1e-10);
    if (order >= 3) CHECK(std::abs(m4 - 3.0) < 1e-9);
  }
}
