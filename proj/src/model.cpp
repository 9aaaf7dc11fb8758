#include "irtols/model.hpp"

#include <cmath>
#include <string>

namespace irtols {

std::string_view to_string(ModelKind kind) {
  return kind == ModelKind::OnePL ? "1pl" : "2pl";
}

ModelKind parse_model_kind(std::string_view text) {
  if (text == "1pl" || text == "1PL") return ModelKind::OnePL;
  if (text == "2pl" || text == "2PL") return ModelKind::TwoPL;
  throw std::invalid_argument("unknown model '" + std::string(text) + "' (expected 1pl or 2pl)");
}

DegenerateSlopeError::DegenerateSlopeError(double slope, double threshold)
    : std::domain_error("degenerate slope a=" + std::to_string(slope) +
                        " (tau=" + std::to_string(threshold) + ")"),
      slope_(slope),
      threshold_(threshold) {}

ItemParams ItemParams::from_difficulty(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b)) throw DomainError("non-finite item parameters");
  return ItemParams(a, b, -a * b);
}

ItemParams ItemParams::from_slope_threshold(double a, double tau) {
  if (!std::isfinite(a) || !std::isfinite(tau)) throw DomainError("non-finite item parameters");
  if (std::abs(a) < kMinSlope) throw DegenerateSlopeError(a, tau);
  return ItemParams(a, -tau / a, tau);
}

double logistic(double z) {
  if (z <= 0.0) {
    const double e = std::exp(z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(-z));
}

double irf(const ItemParams& p, double theta) {
  if (!std::isfinite(theta)) throw DomainError("non-finite ability value");
  return logistic(p.a() * (theta - p.b()));
}

IrfGradient irf_grad(const ItemParams& p, double theta) {
  const double prob = irf(p, theta);
  const double slope = prob * (1.0 - prob);
  return {(theta - p.b()) * slope, -p.a() * slope};
}

}  // namespace irtols
