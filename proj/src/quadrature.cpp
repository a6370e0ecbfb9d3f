#include "levyop/quadrature.hpp"

#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

#include "levyop/errors.hpp"
#include "levyop/smooth.hpp"

namespace levyop {

void QuadratureRule::append(const QuadratureRule& other) {
  nodes.insert(nodes.end(), other.nodes.begin(), other.nodes.end());
  weights.insert(weights.end(), other.weights.begin(), other.weights.end());
}

QuadratureRule composite_gauss_legendre(double a, double b, double max_panel) {
  if (!(b > a) || !(max_panel > 0.0)) throw ParameterError("composite_gauss_legendre: bad interval");
  using GL = boost::math::quadrature::gauss<double, 16>;
  const auto& x = GL::abscissa();
  const auto& w = GL::weights();
  const int panels = static_cast<int>(std::ceil((b - a) / max_panel - 1e-12));
  const double len = (b - a) / panels;
  QuadratureRule r;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * len;
    const double half = 0.5 * len;
    // boost stores the non-negative half of the symmetric rule.
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] == 0.0) {
        r.nodes.push_back(mid);
        r.weights.push_back(w[i] * half);
        continue;
      }
      r.nodes.push_back(mid - half * x[i]);
      r.weights.push_back(w[i] * half);
      r.nodes.push_back(mid + half * x[i]);
      r.weights.push_back(w[i] * half);
    }
  }
  return r;
}

QuadratureRule tanh_sinh_rule(double a, double b, int level) {
  if (!(b > a)) throw ParameterError("tanh_sinh_rule: bad interval");
  const double h = std::ldexp(1.0, -level);
  const double half = 0.5 * (b - a);
  const double t_max = 4.0;
  QuadratureRule r;
  const int m = static_cast<int>(std::floor(t_max / h));
  for (int k = -m; k <= m; ++k) {
    const double t = k * h;
    const double u = 0.5 * kPi * std::sinh(t);
    // Distance to the nearer end computed without cancellation.
    const double e = std::exp(-2.0 * std::abs(u));
    const double dist = 2.0 * half * e / (1.0 + e);
    const double x = u < 0.0 ? a + dist : b - dist;
    const double ch = std::cosh(u);
    const double w = h * half * 0.5 * kPi * std::cosh(t) / (ch * ch);
    if (dist <= 0.0 || !std::isfinite(w)) continue;
    r.nodes.push_back(x);
    r.weights.push_back(w);
  }
  return r;
}

double x_minus_sin(double x) {
  if (std::abs(x) > 0.25) return x - std::sin(x);
  // x^3/3! - x^5/5! + ...
  const double x2 = x * x;
  double term = x * x2 / 6.0, sum = 0.0;
  for (int k = 1; k < 10; ++k) {
    sum += term;
    term *= -x2 / ((2 * k + 2) * (2 * k + 3));
  }
  return sum;
}

}  // namespace levyop
