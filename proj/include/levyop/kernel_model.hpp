#pragma once

#include <span>
#include <string>
#include <vector>

#include "levyop/smooth.hpp"

namespace levyop {

/// x-coefficient a(x) of the principal kernel k1.  All families have integer
/// frequencies (period 2*pi in every coordinate), so they live on any torus
/// with integer half-period.
struct Coefficient {
  enum class Kind { constant, trig, weierstrass, step };

  Kind kind = Kind::constant;
  double a0 = 1.0;
  double a1 = 0.0;
  /// Decay exponent of the lacunary sum; the certified Holder index of the
  /// kernel must not exceed it.
  double holder = 0.7;
  int terms = 4;

  double operator()(const Point& x, int n) const;
  double lower_bound() const;
  double upper_bound() const;
  bool is_constant() const { return kind == Kind::constant || a1 == 0.0; }
};

std::string to_string(Coefficient::Kind kind);
Coefficient::Kind coefficient_kind_from_string(const std::string& name);

/// Jump kernel k = k1 + k2 of the Levy-type operator
///
///   k1(x,y) = a(x) (1 + skew * y_1/|y|) |y|^{-n-alpha} chi(|y|)
///   k2(x,y) = c2 exp(-|y|) (1+|y|)^{-n-1}                 (exp_tail)
///
/// with chi the smooth unit cutoff (1 on [0,1], 0 beyond 2).  The full-space
/// k1 family drops chi; it is a diagnostic for the fractional Laplacian and
/// violates the compact-support assumption on purpose.
struct KernelSpec {
  enum class PrincipalFamily { stable, stable_fullspace };
  enum class TailFamily { none, exp_tail };

  int n = 1;
  double alpha = 1.5;
  double alpha_prime = 0.0;
  double tau = 0.5;
  PrincipalFamily k1_family = PrincipalFamily::stable;
  Coefficient coeff{};
  double skew = 0.0;
  TailFamily k2_family = TailFamily::none;
  double c2 = 0.0;
  /// Constants of the kernel estimates.  Non-positive means "derive": c_lower
  /// becomes inf a * (1-|skew|), C_upper is calibrated by a dense scan.
  double c_lower = -1.0;
  double C_upper = -1.0;

  int derivative_count() const { return n + 1; }
  bool compensated() const { return alpha >= 1.0; }
  bool x_independent() const { return coeff.is_constant(); }
  bool has_tail() const { return k2_family != TailFamily::none && c2 != 0.0; }

  /// Throws ParameterError on out-of-range parameters.
  void validate() const;
  /// Returns a copy with c_lower / C_upper filled in.
  KernelSpec with_derived_constants() const;

  static KernelSpec stable_like(int n, double alpha, Coefficient coeff, double tau = 0.5);
};

/// Radial factor r^{-n-alpha} chi(r) of k1 (no cutoff for the full-space family).
double principal_profile(const KernelSpec& spec, double r);
/// Angular factor 1 + skew * y_1/|y|.
double skew_factor(const KernelSpec& spec, const Point& y);

double eval_k1(const KernelSpec& spec, const Point& x, const Point& y);
double eval_k2(const KernelSpec& spec, const Point& x, const Point& y);
/// k1 + k2; throws DomainError for y = 0.
double eval_kernel(const KernelSpec& spec, const Point& x, const Point& y);

/// sup_x of the k1 x-coefficient times the largest skew factor.
double principal_envelope_scale(const KernelSpec& spec);

struct AssumptionCheck {
  std::string name;
  bool passed = false;
  double measured = 0.0;  // measured constant / value
  double bound = 0.0;     // bound it was compared with
  double margin = 0.0;    // bound - measured (sign convention per check)
  std::string worst_point;
  bool reduced_confidence = false;
  std::string note;
};

struct ValidationReport {
  std::vector<AssumptionCheck> checks;
  /// Log-log slope of k1 along |y| in (0,1]; -(n+alpha) for valid kernels.
  double singularity_exponent = 0.0;
  /// Log-log slopes of |d^m k1/dy_1^m| for m = 1..N.
  std::vector<double> derivative_exponents;
  /// Worst Holder quotient of x -> k(x,y) over the sampled set.
  double holder_quotient = 0.0;
  /// Quadrature value of the k2 tail integral over |y| >= 1.
  double tail_integral = 0.0;

  bool all_passed() const;
  const AssumptionCheck& check(const std::string& name) const;
};

/// Numerically checks the standing kernel assumptions on the given samples:
/// support of k1, y-derivative bounds (central differences up to order N),
/// lower bound near the origin, the three k2 conditions, and Holder
/// regularity in x via a worst-case dyadic quotient scan.
ValidationReport validate_assumptions(const KernelSpec& spec, std::span<const Point> x_samples,
                                      std::span<const Point> y_samples);

/// Default sample sets used by the CLI: a uniform x-grid over one period
/// (containing x = 0) and log-spaced displacements in (0, 4].
std::vector<Point> default_x_samples(int n, int count);
std::vector<Point> default_y_samples(int n, int count);

/// Worst-case dyadic Holder quotient scan of a scalar function: for each
/// sample x and h = h0 2^{-m}, m < levels, the centered pair (x-h/2, x+h/2)
/// along every axis.  Returns the max quotient per level.
template <class F>
std::vector<double> holder_quotient_levels(F&& g, std::span<const Point> xs, int n, double tau,
                                           double h0, int levels) {
  std::vector<double> out(levels, 0.0);
  for (int m = 0; m < levels; ++m) {
    const double h = h0 * std::ldexp(1.0, -m);
    double best = 0.0;
    for (const auto& x : xs) {
      for (int d = 0; d < n; ++d) {
        Point lo = x, hi = x;
        lo[d] -= 0.5 * h;
        hi[d] += 0.5 * h;
        const double q = std::abs(g(hi) - g(lo)) / std::pow(h, tau);
        if (q > best) best = q;
      }
    }
    out[m] = best;
  }
  return out;
}

}  // namespace levyop
