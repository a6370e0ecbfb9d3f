#pragma once

#include <cmath>
#include <vector>

namespace levyop {

/// Fixed quadrature rule: sum_i weights[i] f(nodes[i]).
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  void append(const QuadratureRule& other);
  std::size_t size() const { return nodes.size(); }
  template <class F>
  double integrate(F&& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
    return s;
  }
};

/// 16-point Gauss-Legendre panels of length <= max_panel covering [a, b].
QuadratureRule composite_gauss_legendre(double a, double b, double max_panel);

/// Truncated tanh-sinh rule on (a, b] with step 2^{-level}; nodes cluster at
/// both ends, with the endpoint a never sampled.
QuadratureRule tanh_sinh_rule(double a, double b, int level);

/// x - sin x without cancellation for small |x|.
double x_minus_sin(double x);
/// 1 - cos x without cancellation.
inline double one_minus_cos(double x) {
  const double s = std::sin(0.5 * x);
  return 2.0 * s * s;
}
}  // namespace levyop
