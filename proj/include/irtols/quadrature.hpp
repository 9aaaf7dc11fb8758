#pragma once

// Gauss-Hermite rules and their rescaling onto a standard normal latent trait.

#include <stdexcept>
#include <vector>

namespace irtols {

inline constexpr int kMaxQuadraturePoints = 50;

class InvalidOrderError : public std::invalid_argument {
 public:
  explicit InvalidOrderError(int order);
  int order() const { return order_; }

 private:
  int order_;
};

struct HermiteRule {
  std::vector<double> nodes;    // roots of the physicists' H_T, ascending
  std::vector<double> weights;  // sum to sqrt(pi)
};

// Nodes and probability masses for theta ~ N(0, 1).
struct QuadratureGrid {
  std::vector<double> nodes;
  std::vector<double> weights;

  int size() const { return static_cast<int>(nodes.size()); }
};

// Golub-Welsch eigenvalues of the Jacobi matrix, polished by Newton steps on
// the orthonormal recurrence. Weights come from the Christoffel function so
// that tail weights keep full relative precision. Throws InvalidOrderError
// unless 1 <= order <= 50.
HermiteRule hermite_rule(int order);

// Nodes scaled by sqrt(2), weights by 1/sqrt(pi), then renormalized to sum to 1.
QuadratureGrid normal_grid(int order);

}  // namespace irtols
