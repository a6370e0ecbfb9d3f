#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "levyop/errors.hpp"
#include "levyop/psdo_apply.hpp"
#include "levyop/quadrature.hpp"

namespace levyop {

namespace {

// Shells below this index sample a at every quadrature node.
constexpr int kDirectShells = 4;

// Barycentric interpolant of a at Chebyshev points of the second kind on one
// dyadic piece.  A symbol of order m rescaled to a dyadic piece is uniformly
// smooth, so a fixed degree serves every shell.
class ChebyshevPiece {
 public:
  static constexpr int kDegree = 96;

  ChebyshevPiece(const std::function<double(double)>& a, double lo, double hi) : x_(kDegree + 1), f_(kDegree + 1) {
    for (int k = 0; k <= kDegree; ++k)
      x_[k] = 0.5 * (lo + hi) + 0.5 * (hi - lo) * std::cos(kPi * k / kDegree);
#pragma omp parallel for schedule(dynamic, 4)
    for (int k = 0; k <= kDegree; ++k) f_[k] = a(x_[k]);
  }

  double operator()(double x) const {
    double num = 0.0, den = 0.0;
    for (int k = 0; k <= kDegree; ++k) {
      const double d = x - x_[k];
      if (d == 0.0) return f_[k];
      double w = (k % 2 == 0 ? 1.0 : -1.0) / d;
      if (k == 0 || k == kDegree) w *= 0.5;
      num += w * f_[k];
      den += w;
    }
    return num / den;
  }

 private:
  std::vector<double> x_, f_;
};

}  // namespace

SchwartzKernelTable schwartz_kernel_sum(const std::function<double(double)>& a, double m, const std::vector<double>& z,
                                        const SchwartzOptions& opt) {
  constexpr int n = 1;
  if (!(m > -n)) throw ParameterError("schwartz_kernel_sum: order must exceed -n");
  if (z.empty()) throw ParameterError("schwartz_kernel_sum: no sample points");
  for (double v : z)
    if (!(v != 0.0) || !std::isfinite(v)) throw ParameterError("schwartz_kernel_sum: z must be finite and nonzero");

  SchwartzKernelTable t;
  t.z = z;
  t.order = m;
  t.n = n;
  const std::size_t Z = z.size();
  t.total.assign(Z, 0.0);
  t.last_shell.assign(Z, -1);
  std::vector<double> peak(Z, 0.0);
  std::vector<int> quiet(Z, 0);
  std::vector<char> active(Z, 1);
  std::size_t n_active = Z;
  constexpr int kQuietShells = 3;

  for (int j = 0; j <= opt.max_shell && n_active > 0; ++j) {
    double z_max = 0.0;
    const bool record_all = j <= opt.record_through;
    for (std::size_t i = 0; i < Z; ++i)
      if (active[i] || record_all) z_max = std::max(z_max, std::abs(z[i]));
    const double lo = j == 0 ? 0.0 : std::ldexp(1.0, j - 1);
    const double mid = std::ldexp(1.0, j);
    const double hi = std::ldexp(1.0, j + 1);
    // Sixteen-point panels integrate a full period of cos(z xi) to rounding.
    const double panel = std::min(2.0 * kPi / z_max, std::max(0.5 * kPi, (hi - lo) / 8.0));
    QuadratureRule rule;
    // a may behave like |xi|^m at the origin; tanh-sinh absorbs the endpoint.
    if (j == 0)
      rule = tanh_sinh_rule(0.0, std::min(mid, panel), 7);
    else
      rule = composite_gauss_legendre(lo, mid, panel);
    if (j == 0 && panel < mid) rule.append(composite_gauss_legendre(panel, mid, panel));
    rule.append(composite_gauss_legendre(mid, hi, panel));

    std::vector<double> amp(rule.size());
    if (j < kDirectShells) {
#pragma omp parallel for schedule(dynamic, 16)
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const double xi = rule.nodes[q];
        amp[q] = rule.weights[q] * a(xi) * DyadicPartition::profile(j, xi) / kPi;
      }
    } else {
      const ChebyshevPiece lower(a, lo, mid), upper(a, mid, hi);
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const double xi = rule.nodes[q];
        const double av = xi < mid ? lower(xi) : upper(xi);
        amp[q] = rule.weights[q] * av * DyadicPartition::profile(j, xi) / kPi;
      }
    }
    // Rounding floor of the cancelling sum below: the products z * xi carry
    // an absolute phase error of about eps |z xi|.  A shell under it is noise.
    double mass = 0.0, moment = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      mass += std::abs(amp[q]);
      moment += std::abs(amp[q]) * rule.nodes[q];
    }
    const double eps = std::numeric_limits<double>::epsilon();
    std::vector<double> shell(Z, 0.0);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < Z; ++i) {
      if (!active[i] && !record_all) continue;
      double s = 0.0;
      for (std::size_t q = 0; q < rule.size(); ++q) s += amp[q] * std::cos(z[i] * rule.nodes[q]);
      shell[i] = s;
    }
    for (std::size_t i = 0; i < Z; ++i) {
      if (!active[i]) continue;
      t.total[i] += shell[i];
      peak[i] = std::max(peak[i], std::abs(shell[i]));
      const double scale = std::max(std::abs(t.total[i]), peak[i]);
      const double floor = 16.0 * eps * (mass + std::abs(z[i]) * moment);
      quiet[i] = std::abs(shell[i]) <= opt.rel_tol * scale + floor ? quiet[i] + 1 : 0;
      if (quiet[i] >= kQuietShells) {
        active[i] = 0;
        t.last_shell[i] = j;
        --n_active;
      }
    }
    t.shells.push_back(std::move(shell));
  }
  if (n_active > 0) {
    std::ostringstream os;
    os << "schwartz_kernel_sum: " << n_active << " sample(s) not settled after " << opt.max_shell << " shells";
    throw ComputationError(os.str());
  }
  return t;
}

double kernel_decay_slope(const SchwartzKernelTable& t, double z_lo, double z_hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (std::size_t i = 0; i < t.z.size(); ++i) {
    const double az = std::abs(t.z[i]);
    if (az < z_lo || az > z_hi || t.total[i] == 0.0) continue;
    const double x = std::log(az), y = std::log(std::abs(t.total[i]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  if (cnt < 2) throw ParameterError("kernel_decay_slope: fewer than two samples in range");
  return (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
}

double shell_decay_constant(const SchwartzKernelTable& t, int j, double M) {
  if (j < 0 || j >= static_cast<int>(t.shells.size())) throw ParameterError("shell_decay_constant: shell out of range");
  double c = 0.0;
  for (std::size_t i = 0; i < t.z.size(); ++i)
    c = std::max(c, std::abs(t.shells[j][i]) * std::pow(std::abs(t.z[i]), M));
  return c / std::pow(2.0, j * (t.n + t.order - M));
}

}  // namespace levyop
