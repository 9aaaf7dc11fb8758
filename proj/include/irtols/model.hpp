#pragma once

#include <stdexcept>
#include <string_view>

namespace irtols {

inline constexpr double kMinSlope = 1e-6;

enum class ModelKind { OnePL, TwoPL };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view text);  // "1pl" / "2pl"

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class DegenerateSlopeError : public std::domain_error {
 public:
  DegenerateSlopeError(double slope, double threshold);
  double slope() const { return slope_; }
  double threshold() const { return threshold_; }

 private:
  double slope_;
  double threshold_;
};

// Item parameters kept in both parametrizations: a(theta - b) = a*theta + tau.
class ItemParams {
 public:
  ItemParams() = default;

  static ItemParams from_difficulty(double a, double b);
  // b = -tau / a; throws DegenerateSlopeError when |a| < kMinSlope.
  static ItemParams from_slope_threshold(double a, double tau);

  double a() const { return a_; }
  double b() const { return b_; }
  double tau() const { return tau_; }

  bool operator==(const ItemParams&) const = default;

 private:
  ItemParams(double a, double b, double tau) : a_(a), b_(b), tau_(tau) {}

  double a_ = 1.0;
  double b_ = 0.0;
  double tau_ = 0.0;
};

struct IrfGradient {
  double d_a;
  double d_b;
};

// Logistic item response function exp(a(theta-b)) / (1 + exp(a(theta-b))).
double irf(const ItemParams& p, double theta);
IrfGradient irf_grad(const ItemParams& p, double theta);

// Stable logistic of a log-odds value.
double logistic(double z);

}  // namespace irtols
