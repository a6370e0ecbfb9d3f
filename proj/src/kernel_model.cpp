#include "levyop/kernel_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "levyop/errors.hpp"

namespace levyop {

namespace {

double lacunary(double x, double holder, int terms) {
  double s = 0.0, norm = 0.0;
  for (int k = 0; k < terms; ++k) {
    const double w = std::pow(2.0, -k * holder);
    s += w * std::cos(std::ldexp(1.0, k) * x + k);
    norm += w;
  }
  return s / norm;
}

std::string point_str(const Point& p, int n) {
  std::ostringstream os;
  os << "(" << p[0];
  if (n == 2) os << "," << p[1];
  os << ")";
  return os.str();
}

// Central-difference stencils (second-order accurate) for orders 0..3.
struct Stencil {
  std::vector<int> offsets;
  std::vector<double> weights;
};

Stencil central_stencil(int order) {
  switch (order) {
    case 0: return {{0}, {1.0}};
    case 1: return {{-1, 1}, {-0.5, 0.5}};
    case 2: return {{-1, 0, 1}, {1.0, -2.0, 1.0}};
    case 3: return {{-2, -1, 1, 2}, {-0.5, 1.0, -1.0, 0.5}};
    default: throw ParameterError("finite-difference order > 3 not supported");
  }
}

// d^beta/dy^beta of k1(x, .) at y by tensor-product central differences.
double fd_derivative(const KernelSpec& spec, const Point& x, const Point& y, std::array<int, 2> beta,
                     double h) {
  const Stencil s0 = central_stencil(beta[0]);
  const Stencil s1 = central_stencil(spec.n == 2 ? beta[1] : 0);
  double acc = 0.0;
  for (std::size_t i = 0; i < s0.offsets.size(); ++i) {
    for (std::size_t j = 0; j < s1.offsets.size(); ++j) {
      Point yy = y;
      yy[0] += s0.offsets[i] * h;
      if (spec.n == 2) yy[1] += s1.offsets[j] * h;
      acc += s0.weights[i] * s1.weights[j] * eval_k1(spec, x, yy);
    }
  }
  return acc / std::pow(h, beta[0] + (spec.n == 2 ? beta[1] : 0));
}

std::vector<std::array<int, 2>> multi_indices(int n, int max_order) {
  std::vector<std::array<int, 2>> out;
  for (int a = 0; a <= max_order; ++a) {
    if (n == 1) {
      out.push_back({a, 0});
    } else {
      for (int b = 0; a + b <= max_order; ++b) out.push_back({a, b});
    }
  }
  return out;
}

double slope_fit(const std::vector<double>& lx, const std::vector<double>& ly) {
  const double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// C^tau norm (sup + worst dyadic quotient) of x -> g(x) over the samples.
template <class G>
double holder_norm(G&& g, std::span<const Point> xs, int n, double tau, int levels) {
  double sup = 0.0;
  for (const auto& x : xs) sup = std::max(sup, std::abs(g(x)));
  const auto q = holder_quotient_levels(g, xs, n, tau, 1.0, levels);
  return sup + *std::max_element(q.begin(), q.end());
}

// Scaled derivative constant max_beta ||d^beta k1(.,y)||_{C^tau} |y|^{n+alpha+|beta|}.
struct DerivativeScan {
  double worst = 0.0;
  Point worst_y{};
  std::array<int, 2> worst_beta{};
  bool reduced_confidence = false;
};

DerivativeScan scan_derivatives(const KernelSpec& spec, std::span<const Point> xs,
                                std::span<const Point> ys, int holder_levels) {
  DerivativeScan out;
  const auto betas = multi_indices(spec.n, spec.derivative_count());
  for (const auto& y : ys) {
    const double r = norm(y, spec.n);
    if (r <= 0.0 || r > 2.0) continue;
    double h = 0.02 * r;
    if (h < 1e3 * std::numeric_limits<double>::min()) {
      out.reduced_confidence = true;
      continue;
    }
    // Keep the stencil away from the cutoff kinks of the support edge.
    if (r < 2.0 && r + 2.0 * h > 2.0) h = std::max((2.0 - r) / 2.5, 1e-6 * r);
    for (const auto& beta : betas) {
      auto g = [&](const Point& x) { return fd_derivative(spec, x, y, beta, h); };
      const double nrm = holder_norm(g, xs, spec.n, spec.tau, holder_levels);
      if (!std::isfinite(nrm)) {
        out.reduced_confidence = true;
        continue;
      }
      const double scaled = nrm * std::pow(r, spec.n + spec.alpha + beta[0] + beta[1]);
      if (scaled > out.worst) {
        out.worst = scaled;
        out.worst_y = y;
        out.worst_beta = beta;
      }
    }
  }
  return out;
}

}  // namespace

double Coefficient::operator()(const Point& x, int n) const {
  switch (kind) {
    case Kind::constant: return a0;
    case Kind::trig: {
      double s = 0.0;
      for (int d = 0; d < n; ++d) s += std::sin(x[d]);
      return a0 + a1 * s / n;
    }
    case Kind::weierstrass: {
      double s = 0.0;
      for (int d = 0; d < n; ++d) s += lacunary(x[d], holder, terms);
      return a0 + a1 * s / n;
    }
    case Kind::step: {
      // Jump at x_1 = 0 (and, periodically, at +-pi).
      const double t = std::remainder(x[0], 2.0 * kPi);
      return t >= 0.0 ? a0 + a1 : a0 - a1;
    }
  }
  return a0;
}

double Coefficient::lower_bound() const { return is_constant() ? a0 : a0 - std::abs(a1); }
double Coefficient::upper_bound() const { return is_constant() ? a0 : a0 + std::abs(a1); }

std::string to_string(Coefficient::Kind kind) {
  switch (kind) {
    case Coefficient::Kind::constant: return "constant";
    case Coefficient::Kind::trig: return "trig";
    case Coefficient::Kind::weierstrass: return "weierstrass";
    case Coefficient::Kind::step: return "step";
  }
  return "constant";
}

Coefficient::Kind coefficient_kind_from_string(const std::string& name) {
  if (name == "constant") return Coefficient::Kind::constant;
  if (name == "trig") return Coefficient::Kind::trig;
  if (name == "weierstrass") return Coefficient::Kind::weierstrass;
  if (name == "step") return Coefficient::Kind::step;
  throw ParameterError("unknown coefficient family '" + name + "'");
}

void KernelSpec::validate() const {
  if (n != 1 && n != 2) throw ParameterError("dimension n must be 1 or 2");
  if (!(alpha > 0.0 && alpha < 2.0)) throw ParameterError("alpha out of (0,2)");
  if (!(alpha_prime >= 0.0 && alpha_prime < alpha)) throw ParameterError("alpha_prime out of [0,alpha)");
  if (!(tau > 0.0 && tau < 1.0)) throw ParameterError("tau out of (0,1)");
  if (!(std::abs(skew) < 1.0)) throw ParameterError("skew out of (-1,1)");
  if (!(coeff.lower_bound() > 0.0)) throw ParameterError("coefficient a(x) must be bounded below by a positive constant");
  if (coeff.kind == Coefficient::Kind::weierstrass && (coeff.terms < 1 || coeff.holder <= 0.0))
    throw ParameterError("weierstrass coefficient needs terms >= 1 and holder > 0");
  if (c2 < 0.0) throw ParameterError("c2 must be non-negative");
}

KernelSpec KernelSpec::stable_like(int n, double alpha, Coefficient coeff, double tau) {
  KernelSpec s;
  s.n = n;
  s.alpha = alpha;
  s.coeff = coeff;
  s.tau = tau;
  s.validate();
  return s.with_derived_constants();
}

KernelSpec KernelSpec::with_derived_constants() const {
  validate();
  KernelSpec s = *this;
  if (s.c_lower <= 0.0) s.c_lower = coeff.lower_bound() * (1.0 - std::abs(skew));
  if (s.C_upper <= 0.0) {
    // Calibrated on a fixed dense sample with a factor-two margin.
    const auto xs = default_x_samples(n, n == 1 ? 48 : 12);
    std::vector<Point> ys;
    for (int i = 0; i <= 24; ++i) {
      const double r = 1e-3 * std::pow(1.99e3, i / 24.0);
      ys.push_back({r, 0.0});
      if (n == 2) ys.push_back({r * std::cos(2.1), r * std::sin(2.1)});
    }
    // The cutoff band carries the largest scaled derivatives.
    for (int i = 1; i < 64; ++i) {
      const double r = 1.0 + i / 64.0;
      ys.push_back({r, 0.0});
      if (n == 2) ys.push_back({r * std::cos(2.1), r * std::sin(2.1)});
    }
    KernelSpec probe = s;
    probe.k1_family = PrincipalFamily::stable;
    const auto scan = scan_derivatives(probe, xs, ys, 10);
    double k2c = 0.0;
    if (has_tail()) {
      for (const auto& y : ys) {
        const double r = norm(y, n);
        if (r <= 1.0) k2c = std::max(k2c, eval_k2(s, xs[0], y) * std::pow(r, n + alpha_prime));
      }
    }
    s.C_upper = 2.0 * std::max(scan.worst, k2c);
  }
  return s;
}

double principal_profile(const KernelSpec& spec, double r) {
  const double base = std::pow(r, -spec.n - spec.alpha);
  if (spec.k1_family == KernelSpec::PrincipalFamily::stable_fullspace) return base;
  if (r >= 2.0) return 0.0;
  return base * unit_ramp(r);
}

double skew_factor(const KernelSpec& spec, const Point& y) {
  if (spec.skew == 0.0) return 1.0;
  return 1.0 + spec.skew * y[0] / norm(y, spec.n);
}

double eval_k1(const KernelSpec& spec, const Point& x, const Point& y) {
  const double r = norm(y, spec.n);
  const double prof = principal_profile(spec, r);
  if (prof == 0.0) return 0.0;
  return spec.coeff(x, spec.n) * skew_factor(spec, y) * prof;
}

double eval_k2(const KernelSpec& spec, const Point&, const Point& y) {
  if (!spec.has_tail()) return 0.0;
  const double r = norm(y, spec.n);
  return spec.c2 * std::exp(-r) * std::pow(1.0 + r, -spec.n - 1);
}

double eval_kernel(const KernelSpec& spec, const Point& x, const Point& y) {
  if (norm(y, spec.n) == 0.0) throw DomainError("kernel evaluated at y = 0");
  return eval_k1(spec, x, y) + eval_k2(spec, x, y);
}

double principal_envelope_scale(const KernelSpec& spec) {
  return spec.coeff.upper_bound() * (1.0 + std::abs(spec.skew));
}

bool ValidationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const AssumptionCheck& ValidationReport::check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw ParameterError("no assumption check named '" + name + "'");
}

std::vector<Point> default_x_samples(int n, int count) {
  std::vector<Point> out;
  const double h = 2.0 * kPi / count;
  if (n == 1) {
    for (int i = 0; i < count; ++i) out.push_back({-kPi + i * h, 0.0});
  } else {
    for (int i = 0; i < count; ++i)
      for (int j = 0; j < count; ++j) out.push_back({-kPi + i * h, -kPi + j * h});
  }
  return out;
}

std::vector<Point> default_y_samples(int n, int count) {
  std::vector<Point> out;
  for (int i = 0; i < count; ++i) {
    const double r = 1e-3 * std::pow(4e3, static_cast<double>(i) / (count - 1));
    if (n == 1) {
      out.push_back({r, 0.0});
      out.push_back({-r, 0.0});
    } else {
      const double th = 0.37 + 2.0 * kPi * i / count;
      out.push_back({r * std::cos(th), r * std::sin(th)});
    }
  }
  return out;
}

ValidationReport validate_assumptions(const KernelSpec& spec_in, std::span<const Point> xs,
                                      std::span<const Point> ys) {
  if (xs.empty() || ys.empty()) throw ParameterError("validate_assumptions: empty sample set");
  for (const auto& y : ys)
    if (norm(y, spec_in.n) == 0.0) throw DomainError("validate_assumptions: y sample at the origin");
  const KernelSpec spec = spec_in.with_derived_constants();
  const int n = spec.n;
  ValidationReport rep;

  // (1) compact support of k1.
  {
    AssumptionCheck c;
    c.name = "k1_support";
    double worst = 0.0;
    Point wp{};
    for (const auto& x : xs)
      for (const auto& y : ys) {
        if (norm(y, n) < 2.0) continue;
        const double v = std::abs(eval_k1(spec, x, y));
        if (v > worst) {
          worst = v;
          wp = y;
        }
      }
    c.measured = worst;
    c.bound = 0.0;
    c.margin = -worst;
    c.passed = worst == 0.0;
    c.worst_point = "y=" + point_str(wp, n);
    rep.checks.push_back(c);
  }

  // (2) derivative bounds (3).
  {
    AssumptionCheck c;
    c.name = "k1_derivative_bounds";
    const auto scan = scan_derivatives(spec, xs, ys, 12);
    c.measured = scan.worst;
    c.bound = spec.C_upper;
    c.margin = spec.C_upper - scan.worst;
    c.passed = c.margin >= 0.0;
    c.reduced_confidence = scan.reduced_confidence;
    c.worst_point = "y=" + point_str(scan.worst_y, n) + " beta=(" + std::to_string(scan.worst_beta[0]) +
                    "," + std::to_string(scan.worst_beta[1]) + ")";
    if (scan.reduced_confidence) c.note = "stencil shrunk near |y| -> 0";
    rep.checks.push_back(c);

    // Growth exponents along +e1 on (0,1].
    std::vector<double> lr, lk;
    std::vector<Point> ray;
    for (const auto& y : ys) {
      const double r = norm(y, n);
      if (r > 0.0 && r <= 1.0) ray.push_back({r, 0.0});
    }
    std::sort(ray.begin(), ray.end());
    ray.erase(std::unique(ray.begin(), ray.end()), ray.end());
    if (ray.size() >= 2) {
      for (const auto& y : ray) {
        lr.push_back(std::log(y[0]));
        lk.push_back(std::log(std::abs(eval_k1(spec, xs.front(), y))));
      }
      rep.singularity_exponent = slope_fit(lr, lk);
      for (int m = 1; m <= spec.derivative_count(); ++m) {
        std::vector<double> ld;
        for (const auto& y : ray) {
          const double h = 0.02 * y[0];
          ld.push_back(std::log(std::abs(fd_derivative(spec, xs.front(), y, {m, 0}, h))));
        }
        rep.derivative_exponents.push_back(slope_fit(lr, ld));
      }
    }
  }

  // (3) lower bound (4) and positivity.
  {
    AssumptionCheck c;
    c.name = "k1_lower_bound";
    double worst = std::numeric_limits<double>::infinity();
    Point wx{}, wy{};
    bool positive = true;
    for (const auto& x : xs)
      for (const auto& y : ys) {
        const double r = norm(y, n);
        const double k = eval_kernel(spec, x, y);
        if ((eval_k1(spec, x, y) > 0.0 || eval_k2(spec, x, y) > 0.0) && !(k > 0.0)) positive = false;
        if (r > 1.0) continue;
        const double scaled = eval_k1(spec, x, y) * std::pow(r, n + spec.alpha);
        if (scaled < worst) {
          worst = scaled;
          wx = x;
          wy = y;
        }
      }
    c.measured = worst;
    c.bound = spec.c_lower;
    c.margin = worst - spec.c_lower;
    c.passed = positive && c.margin >= -1e-12 * spec.c_lower;
    c.worst_point = "x=" + point_str(wx, n) + " y=" + point_str(wy, n);
    if (!positive) c.note = "kernel not positive where k1 or k2 is";
    rep.checks.push_back(c);
  }

  auto k2_norm = [&](const Point& y) {
    auto g = [&](const Point& x) { return eval_k2(spec, x, y); };
    return holder_norm(g, xs, n, spec.tau, 12);
  };

  // (4) near-origin bound on k2 (5).
  {
    AssumptionCheck c;
    c.name = "k2_near_origin";
    double worst = 0.0;
    Point wy{};
    for (const auto& y : ys) {
      const double r = norm(y, n);
      if (r > 1.0) continue;
      const double v = k2_norm(y) * std::pow(r, n + spec.alpha_prime);
      if (v > worst) {
        worst = v;
        wy = y;
      }
    }
    c.measured = worst;
    c.bound = spec.C_upper;
    c.margin = spec.C_upper - worst;
    c.passed = c.margin >= 0.0;
    c.worst_point = "y=" + point_str(wy, n);
    rep.checks.push_back(c);
  }

  // (5) integrable tail (6).
  {
    AssumptionCheck c;
    c.name = "k2_tail_integral";
    double value = 0.0, err = 0.0;
    if (spec.has_tail()) {
      auto radial = [&](double r) {
        const Point y{r, 0.0};
        const double w = n == 1 ? 2.0 : 2.0 * kPi * r;
        return w * k2_norm(y);
      };
      boost::math::quadrature::exp_sinh<double> integrator;
      value = integrator.integrate([&](double t) { return radial(1.0 + t); }, 1e-10, &err);
    }
    rep.tail_integral = value;
    c.measured = value;
    c.bound = std::numeric_limits<double>::infinity();
    c.margin = err;
    c.passed = std::isfinite(value) && err <= 1e-6 * std::max(1.0, value);
    c.note = "quadrature error estimate stored in margin";
    rep.checks.push_back(c);
  }

  // (6) k2 vanishes at infinity (7).
  {
    AssumptionCheck c;
    c.name = "k2_vanishing";
    double first = 0.0, last = 0.0;
    bool monotone = true;
    double prev = std::numeric_limits<double>::infinity();
    for (int j = 1; j <= 12; ++j) {
      const double v = k2_norm({std::ldexp(1.0, j), 0.0});
      if (j == 1) first = v;
      last = v;
      if (v > prev * (1.0 + 1e-12)) monotone = false;
      prev = v;
    }
    c.measured = last;
    c.bound = first;
    c.margin = first - last;
    c.passed = monotone && last <= 1e-6 * std::max(first, 1e-300);
    if (!spec.has_tail()) {
      c.passed = true;
      c.note = "k2 identically zero";
    }
    rep.checks.push_back(c);
  }

  // (7) Holder regularity of x -> k(x,y), certified by a dyadic quotient scan.
  {
    AssumptionCheck c;
    c.name = "holder_in_x";
    constexpr int levels = 40;
    double worst = 0.0;
    Point wy{};
    bool unbounded = false;
    for (const auto& y : ys) {
      const double r = norm(y, n);
      if (r > 2.0) continue;
      auto g = [&](const Point& x) { return eval_kernel(spec, x, y); };
      const auto q = holder_quotient_levels(g, xs, n, spec.tau, 1.0, levels);
      const double scale = std::pow(r, n + spec.alpha);
      const double qmax = *std::max_element(q.begin(), q.end()) * scale;
      const double q_small = *std::max_element(q.end() - 5, q.end());
      const double q_mid = *std::max_element(q.end() - 15, q.end() - 10);
      if (q_small > 2.0 * q_mid && q_small > 0.0) unbounded = true;
      if (qmax > worst) {
        worst = qmax;
        wy = y;
      }
    }
    rep.holder_quotient = worst;
    c.measured = worst;
    c.bound = spec.C_upper;
    c.margin = spec.C_upper - worst;
    c.passed = !unbounded && c.margin >= 0.0;
    c.worst_point = "y=" + point_str(wy, n);
    if (unbounded) c.note = "quotient grows as h -> 0";
    rep.checks.push_back(c);
  }

  return rep;
}

}  // namespace levyop
