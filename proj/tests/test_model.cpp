#include <cmath>
#include <limits>

#include <doctest.h>

#include "irtols/model.hpp"

using namespace irtols;

TEST_CASE("irf examples") {
  CHECK(irf(ItemParams::from_difficulty(1, 0), 0.0) == 0.5);
  CHECK(irf(ItemParams::from_difficulty(2, 1), 1.0) == 0.5);
  CHECK(irf(ItemParams::from_difficulty(1, 0), std::log(3.0)) == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("irf stays finite and in range for extreme arguments") {
  const auto p = ItemParams::from_difficulty(5, 0);
  CHECK(irf(p, 200.0) == 1.0);
  CHECK(irf(p, -200.0) >= 0.0);
  CHECK(std::isfinite(irf(p, -200.0)));
  CHECK(irf(p, 5.0) < 1.0);
  CHECK(irf(p, -100.0) > 0.0);
}

TEST_CASE("non-finite inputs are domain errors") {
  const double inf = std::numeric_limits<double>::infinity();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(ItemParams::from_difficulty(nan, 0), DomainError);
  CHECK_THROWS_AS(ItemParams::from_difficulty(1, inf), DomainError);
  CHECK_THROWS_AS(irf(ItemParams::from_difficulty(1, 0), nan), DomainError);
  CHECK_THROWS_AS(irf_grad(ItemParams::from_difficulty(1, 0), inf), DomainError);
}

TEST_CASE("irf gradient examples") {
  auto g = irf_grad(ItemParams::from_difficulty(1, 0), 0.0);
  CHECK(g.d_a == 0.0);
  CHECK(g.d_b == -0.25);
  g = irf_grad(ItemParams::from_difficulty(2, 1), 1.0);
  CHECK(g.d_a == 0.0);
  CHECK(g.d_b == -0.5);
  g = irf_grad(ItemParams::from_difficulty(1, 0), std::log(3.0));
  CHECK(g.d_a == doctest::Approx(std::log(3.0) * 0.1875).epsilon(1e-14));
  CHECK(g.d_b == doctest::Approx(-0.1875).epsilon(1e-14));
}

namespace {

// Differences the smaller of P and 1 - P, using 1 - P(theta) = P(2b - theta),
// so the oracle does not lose digits to cancellation near P = 1.
double tail_prob(double a, double b, double theta, bool upper) {
  const auto p = ItemParams::from_difficulty(a, b);
  return upper ? -irf(p, 2 * b - theta) : irf(p, theta);
}

}  // namespace

TEST_CASE("irf gradient agrees with central differences") {
  const double h = 1e-6;
  for (double a : {0.3, 1.0, 2.0}) {
    for (double b : {-3.0, 0.0, 3.0}) {
      for (int k = -4; k <= 4; ++k) {
        const double theta = k;
        CAPTURE(a);
        CAPTURE(b);
        CAPTURE(theta);
        const auto g = irf_grad(ItemParams::from_difficulty(a, b), theta);
        const bool upper = a * (theta - b) > 0;
        const double fd_a =
            (tail_prob(a + h, b, theta, upper) - tail_prob(a - h, b, theta, upper)) / (2 * h);
        const double fd_b =
            (tail_prob(a, b + h, theta, upper) - tail_prob(a, b - h, theta, upper)) / (2 * h);
        // d/da vanishes at theta == b; compare absolutely there.
        if (g.d_a == 0.0) {
          CHECK(std::abs(fd_a) < 1e-9);
        } else {
          CHECK(std::abs(fd_a - g.d_a) / std::abs(g.d_a) < 1e-6);
        }
        CHECK(std::abs(fd_b - g.d_b) / std::abs(g.d_b) < 1e-6);
      }
    }
  }
}

TEST_CASE("irf is monotone and symmetric about b") {
  for (double a : {0.2, 1.0, 3.5}) {
    for (double b : {-2.0, 0.5}) {
      const auto p = ItemParams::from_difficulty(a, b);
      double prev = -1.0;
      for (double theta = -6; theta <= 6; theta += 0.25) {
        const double v = irf(p, theta);
        CHECK(v > prev);
        prev = v;
        CHECK(std::abs(v + irf(p, 2 * b - theta) - 1.0) < 1e-12);
      }
    }
  }
}

TEST_CASE("slope/threshold parametrization") {
  CHECK(ItemParams::from_slope_threshold(1, 0).b() == 0.0);
  CHECK(ItemParams::from_slope_threshold(2, -2).b() == 1.0);
  CHECK(ItemParams::from_slope_threshold(0.5, 1.5).b() == -3.0);

  for (double a : {-1.7, 0.3, 2.0}) {
    for (double b : {-3.1, 0.0, 2.2}) {
      const auto p = ItemParams::from_difficulty(a, b);
      CHECK(std::abs(p.tau() + p.a() * p.b()) < 1e-12);
      const auto q = ItemParams::from_slope_threshold(a, p.tau());
      CHECK(std::abs(q.tau() + q.a() * q.b()) < 1e-12);
      CHECK(q.b() == doctest::Approx(b).epsilon(1e-14));
    }
  }
}

TEST_CASE("degenerate slope carries its values") {
  try {
    (void)ItemParams::from_slope_threshold(1e-7, 0.25);
    FAIL("expected DegenerateSlopeError");
  } catch (const DegenerateSlopeError& e) {
    CHECK(e.slope() == 1e-7);
    CHECK(e.threshold() == 0.25);
  }
  CHECK_NOTHROW(ItemParams::from_slope_threshold(-2e-6, 1.0));
}

TEST_CASE("model kind parsing") {
  CHECK(parse_model_kind("1pl") == ModelKind::OnePL);
  CHECK(parse_model_kind("2PL") == ModelKind::TwoPL);
  CHECK_THROWS_AS(parse_model_kind("3pl"), std::invalid_argument);
  CHECK(to_string(ModelKind::TwoPL) == "2pl");
}
