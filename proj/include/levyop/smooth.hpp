#pragma once

#include <array>
#include <cmath>

namespace levyop {

/// Spatial point; only the first `n` components are meaningful (n <= 2).
using Point = std::array<double, 2>;

inline constexpr int kMaxDim = 2;
inline constexpr double kPi = 3.14159265358979323846;

// Order of the polynomial smoothstep shared by the kernel cutoff and the
// dyadic partition.  C^5 covers N + 2 = n + 3 derivatives for n <= 2.
inline constexpr int kSmoothOrder = 5;

/// Polynomial smoothstep of order q: 0 for t <= 0, 1 for t >= 1, C^q.
inline double smoothstep(double t, int q = kSmoothOrder) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  double sum = 0.0;
  double binom = 1.0;  // C(q+k, k)
  double pw = 1.0;     // (1-t)^k
  for (int k = 0; k <= q; ++k) {
    sum += binom * pw;
    binom = binom * (q + k + 1) / (k + 1);
    pw *= (1.0 - t);
  }
  return std::pow(t, q + 1) * sum;
}

/// Radial ramp: 1 on [0,1], smooth decay on [1,2], 0 beyond 2.
inline double unit_ramp(double r) { return 1.0 - smoothstep(r - 1.0); }

inline double norm(const Point& p, int n) {
  return n == 1 ? std::abs(p[0]) : std::hypot(p[0], p[1]);
}

}  // namespace levyop
