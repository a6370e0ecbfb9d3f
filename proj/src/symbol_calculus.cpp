#include "levyop/symbol_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include "levyop/errors.hpp"
#include "levyop/quadrature.hpp"

namespace levyop {

// ---------------------------------------------------------------------------
// SymbolField

SymbolField SymbolField::constant(const TorusGrid& grid, cplx value, double order) {
  SymbolField s;
  s.grid = grid;
  s.rows = 1;
  s.values.assign(grid.size(), value);
  s.order = order;
  s.derivative_budget = grid.dim() + 1;
  return s;
}

SymbolField SymbolField::from_function(const TorusGrid& grid, bool x_dependent,
                                       const std::function<cplx(const Point&, const Point&)>& fn,
                                       double order) {
  SymbolField s;
  s.grid = grid;
  s.rows = x_dependent ? grid.size() : 1;
  s.values.resize(s.rows * grid.size());
  s.order = order;
  s.derivative_budget = grid.dim() + 1;
  for (std::size_t i = 0; i < s.rows; ++i) {
    const Point x = grid.point(i);
    for (std::size_t k = 0; k < grid.size(); ++k) s.values[i * grid.size() + k] = fn(x, grid.frequency(k));
  }
  return s;
}

SymbolField SymbolField::reflected() const {
  SymbolField out = *this;
  const std::size_t M = grid.size();
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t k = 0; k < M; ++k) out.values[i * M + k] = values[i * M + grid.reflected(k)];
  return out;
}

SymbolField SymbolField::conjugated() const {
  SymbolField out = *this;
  for (auto& v : out.values) v = std::conj(v);
  return out;
}

SymbolField SymbolField::shifted(cplx c) const {
  SymbolField out = *this;
  for (auto& v : out.values) v += c;
  return out;
}

double SymbolField::x_spread() const {
  if (rows == 1) return 0.0;
  const std::size_t M = grid.size();
  double worst = 0.0;
  for (std::size_t k = 0; k < M; ++k) {
    const cplx ref = values[k];
    for (std::size_t i = 1; i < rows; ++i) worst = std::max(worst, std::abs(values[i * M + k] - ref));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Radial quadratures

namespace {

// Above this radius the 1-D even factor switches to the homogeneous split.
constexpr double kLargeRadius = 32.0;

struct Accum {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
};

double sinc(double u) { return std::abs(u) < 1e-4 ? 1.0 - u * u / 6.0 : std::sin(u) / u; }

double x_minus_sin_over_cube(double x) {
  if (std::abs(x) < 1e-3) return 1.0 / 6.0 - x * x / 120.0;
  return x_minus_sin(x) / (x * x * x);
}

// J0(x) - 1 and J1(x) - x/2 without cancellation.
double j0_minus_one(double x) {
  if (x > 2.0) return boost::math::cyl_bessel_j(0, x) - 1.0;
  const double q = 0.25 * x * x;
  double term = -q, sum = 0.0;
  for (int k = 1; k < 30 && std::abs(term) > 1e-18 * std::abs(sum + 1e-300); ++k) {
    sum += term;
    term *= -q / ((k + 1.0) * (k + 1.0));
  }
  return sum;
}

double j1_minus_half(double x) {
  if (x > 2.0) return boost::math::cyl_bessel_j(1, x) - 0.5 * x;
  const double q = 0.25 * x * x;
  // sum_{k>=1} (-1)^k (x/2)^{2k+1} / (k! (k+1)!)
  double term = -0.5 * x * q / 2.0, sum = 0.0;
  for (int k = 1; k < 30 && std::abs(term) > 1e-18 * std::abs(sum + 1e-300); ++k) {
    sum += term;
    term *= -q / ((k + 1.0) * (k + 2.0));
  }
  return sum;
}

double j0_minus_one_over_sq(double x) { return x < 1e-4 ? -0.25 + x * x / 64.0 : j0_minus_one(x) / (x * x); }
double j1_minus_half_over_cube(double x) {
  return x < 1e-3 ? -1.0 / 16.0 + x * x / 384.0 : j1_minus_half(x) / (x * x * x);
}

// int_X^inf u^{-beta} cos(u) du from the integration-by-parts series
//   int_X^inf u^{-beta} e^{iu} du = i e^{iX} X^{-beta} sum_k (-i)^k (beta)_k X^{-k},
// summed to its smallest term (accurate to about e^{-X}).
double cos_tail_integral(double beta, double X) {
  cplx term(1.0, 0.0), sum(0.0, 0.0);
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 400; ++k) {
    const double mag = std::abs(term);
    if (mag > prev || mag < 1e-18 * std::abs(sum)) break;
    sum += term;
    prev = mag;
    term *= cplx(0.0, -1.0) * (beta + k) / X;
  }
  return (cplx(0.0, 1.0) * std::polar(std::pow(X, -beta), X) * sum).real();
}

struct OouraRules {
  boost::math::quadrature::ooura_fourier_cos<double> cos;
  boost::math::quadrature::ooura_fourier_sin<double> sin;
};

// Construction precomputes the node tables, so keep one set per tolerance.
OouraRules& ooura_rules(double tol) {
  thread_local std::map<double, std::unique_ptr<OouraRules>> cache;
  auto& slot = cache[tol];
  if (!slot) slot.reset(new OouraRules{boost::math::quadrature::ooura_fourier_cos<double>(tol, 12),
                                       boost::math::quadrature::ooura_fourier_sin<double>(tol, 12)});
  return *slot;
}

template <class F>
void add_tanh_sinh(Accum& acc, F&& f, double a, double b, double tol) {
  boost::math::quadrature::tanh_sinh<double> ts(12);
  double err = 0.0, l1 = 0.0;
  const double v = ts.integrate(f, a, b, 1e-3 * tol, &err, &l1);
  acc.value += v;
  acc.error += err;
  acc.l1 += l1;
}

template <class F>
void add_panels(Accum& acc, F&& f, double a, double b, double max_panel, double tol) {
  if (!(b > a)) return;
  const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / max_panel)));
  const double len = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    double err = 0.0, l1 = 0.0;
    const double lo = a + p * len, hi = (p + 1 == panels) ? b : a + (p + 1) * len;
    const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 8, tol, &err, &l1);
    acc.value += v;
    acc.error += err;
    acc.l1 += l1;
  }
}

void require_converged(const Accum& acc, double tol, double xi, const char* what) {
  const double scale = std::max(acc.l1, std::abs(acc.value));
  if (!(acc.error <= tol * scale + 1e-300) || !std::isfinite(acc.value)) {
    std::ostringstream os;
    os << what << " quadrature did not reach tolerance at |xi| = " << xi << " (error estimate "
       << acc.error << ", scale " << scale << ")";
    throw ComputationError(os.str());
  }
}

}  // namespace

RadialFactors principal_radial_factors(const KernelSpec& spec, double rho, const SymbolOptions& opt) {
  RadialFactors out;
  if (rho == 0.0) return out;
  const double alpha = spec.alpha;
  const double comp = spec.compensated() ? 1.0 : 0.0;
  const double tol = opt.rel_tol;
  const double r0 = std::min(1.0, 1.0 / rho);
  const double panel = std::min(0.5, kPi / rho);
  const bool full = spec.k1_family == KernelSpec::PrincipalFamily::stable_fullspace;
  if (full && spec.n != 1) throw ParameterError("full-space diagnostic symbol is implemented for n = 1 only");
  if (full && spec.skew != 0.0) throw ParameterError("full-space diagnostic symbol requires skew = 0");
  auto chi = [&](double r) { return full ? 1.0 : unit_ramp(r); };

  if (spec.n == 1) {
    // even: -4 int r^{-1-alpha} chi sin^2(r rho / 2)
    // Written with the leading power of r factored out so that r -> 0 stays finite.
    auto even = [&](double r) {
      const double s = sinc(0.5 * r * rho);
      return -rho * rho * std::pow(r, 1.0 - alpha) * chi(r) * s * s;
    };
    Accum e;
    if (!full && rho > kLargeRadius) {
      // Homogeneous part plus the smooth cutoff correction:
      //   even = rho^alpha E_1 + 2 int_1^inf r^{-1-alpha} (1 - chi) (1 - cos r rho) dr
      // which costs O(1) instead of O(rho) panels.
      thread_local std::map<double, double> e1_cache;
      auto it = e1_cache.find(alpha);
      if (it == e1_cache.end()) {
        KernelSpec homogeneous = spec;
        homogeneous.k1_family = KernelSpec::PrincipalFamily::stable_fullspace;
        homogeneous.skew = 0.0;
        it = e1_cache.emplace(alpha, principal_radial_factors(homogeneous, 1.0, opt).even).first;
      }
      const double e1 = it->second;
      // On [1, 2] fixed Gauss-Legendre panels of half a period; beyond 2 the
      // cosine integral has a usable asymptotic expansion.
      const auto rule = composite_gauss_legendre(1.0, 2.0, kPi / rho);
      double ramp = 0.0;
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const double r = rule.nodes[q];
        ramp += rule.weights[q] * std::pow(r, -1.0 - alpha) * (1.0 - unit_ramp(r)) * one_minus_cos(r * rho);
      }
      const double far = std::pow(2.0, -alpha) / alpha - std::pow(rho, alpha) * cos_tail_integral(1.0 + alpha, 2.0 * rho);
      e.value = std::pow(rho, alpha) * e1 + 2.0 * (ramp + far);
      e.error = 1e-15 * (std::abs(e.value) + std::sqrt(static_cast<double>(rule.size())) * std::abs(ramp));
      e.l1 = std::abs(e.value);
    } else if (full) {
      add_tanh_sinh(e, even, 0.0, r0, tol);
      // int_{r0}^inf r^{-1-alpha}(cos(r rho) - 1): the constant part is exact,
      // the oscillatory part goes through the Ooura rules after a shift.
      auto& [oc, os] = ooura_rules(0.1 * tol);
      auto g = [&](double t) { return std::pow(r0 + t, -1.0 - alpha); };
      const auto c = oc.integrate(g, rho);
      const auto s = os.integrate(g, rho);
      const double osc = std::cos(rho * r0) * c.first - std::sin(rho * r0) * s.first;
      const double flat = std::pow(r0, -alpha) / alpha;
      e.value += 2.0 * (osc - flat);
      e.error += 2.0 * (std::abs(c.first * c.second) + std::abs(s.first * s.second));
      e.l1 += 2.0 * flat;
    } else {
      add_tanh_sinh(e, even, 0.0, r0, tol);
      add_panels(e, even, r0, 1.0, panel, tol);
      add_panels(e, even, 1.0, 2.0, panel, tol);
    }
    require_converged(e, tol, rho, "even symbol");
    out.even = e.value;
    if (spec.skew != 0.0) {
      auto odd = [&](double r) {
        const double x = r * rho;
        if (comp != 0.0) return -2.0 * rho * rho * rho * std::pow(r, 2.0 - alpha) * chi(r) * x_minus_sin_over_cube(x);
        return 2.0 * rho * std::pow(r, -alpha) * chi(r) * sinc(x);
      };
      Accum o;
      add_tanh_sinh(o, odd, 0.0, r0, tol);
      add_panels(o, odd, r0, 1.0, panel, tol);
      add_panels(o, odd, 1.0, 2.0, panel, tol);
      require_converged(o, tol, rho, "odd symbol");
      out.odd = o.value;
    }
    return out;
  }

  auto even2 = [&](double r) {
    const double x = r * rho;
    return 2.0 * kPi * rho * rho * std::pow(r, 1.0 - alpha) * chi(r) * j0_minus_one_over_sq(x);
  };
  Accum e;
  add_tanh_sinh(e, even2, 0.0, r0, tol);
  add_panels(e, even2, r0, 1.0, panel, tol);
  add_panels(e, even2, 1.0, 2.0, panel, tol);
  require_converged(e, tol, rho, "even symbol");
  out.even = e.value;
  if (spec.skew != 0.0) {
    auto odd2 = [&](double r) {
      const double x = r * rho;
      if (comp != 0.0)
        return 2.0 * kPi * rho * rho * rho * std::pow(r, 2.0 - alpha) * chi(r) * j1_minus_half_over_cube(x);
      return 2.0 * kPi * rho * std::pow(r, -alpha) * chi(r) * (x < 1e-4 ? 0.5 - x * x / 16.0 : boost::math::cyl_bessel_j(1, x) / x);
    };
    Accum o;
    add_tanh_sinh(o, odd2, 0.0, r0, tol);
    add_panels(o, odd2, r0, 1.0, panel, tol);
    add_panels(o, odd2, 1.0, 2.0, panel, tol);
    require_converged(o, tol, rho, "odd symbol");
    out.odd = o.value;
  }
  return out;
}

cplx principal_symbol(const KernelSpec& spec, const Point& x, const Point& xi, const SymbolOptions& opt) {
  const double rho = norm(xi, spec.n);
  if (rho == 0.0) return 0.0;
  const auto f = principal_radial_factors(spec, rho, opt);
  const double a = spec.coeff(x, spec.n);
  return a * cplx(f.even, spec.skew * (xi[0] / rho) * f.odd);
}

double tail_symbol(const KernelSpec& spec, double rho, const SymbolOptions& opt) {
  if (!spec.has_tail() || rho == 0.0) return 0.0;
  const double tol = opt.rel_tol;
  auto k2 = [&](double r) { return spec.c2 * std::exp(-r) * std::pow(1.0 + r, -spec.n - 1); };
  if (spec.n == 1) {
    const auto c = ooura_rules(0.1 * tol).cos.integrate(k2, rho);
    boost::math::quadrature::exp_sinh<double> es;
    double err = 0.0;
    const double mass = es.integrate(k2, 0.0, std::numeric_limits<double>::infinity(), tol, &err);
    if (!(c.second <= 1e3 * tol) || !(err <= tol * mass + 1e-300))
      throw ComputationError("tail symbol quadrature did not converge at |xi| = " + std::to_string(rho));
    return 2.0 * (c.first - mass);
  }
  auto f = [&](double r) { return 2.0 * kPi * r * k2(r) * j0_minus_one(r * rho); };
  Accum acc;
  add_panels(acc, f, 0.0, 60.0, std::min(1.0, kPi / rho), tol);
  require_converged(acc, tol, rho, "tail symbol");
  return acc.value;
}

namespace {

long radial_key(const TorusGrid& g, std::size_t k) {
  const auto m = g.multi_index(k);
  const long a = g.signed_index(m[0]);
  const long b = g.dim() == 2 ? g.signed_index(m[1]) : 0;
  return a * a + b * b;
}

}  // namespace

SymbolField compute_symbol(const KernelSpec& spec_in, const TorusGrid& grid, const SymbolOptions& opt) {
  spec_in.validate();
  if (spec_in.n != grid.dim()) throw ParameterError("kernel and grid dimensions differ");
  const KernelSpec& spec = spec_in;
  const std::size_t M = grid.size();

  // One quadrature per distinct |xi|.
  std::map<long, RadialFactors> cache;
  for (std::size_t k = 0; k < M; ++k) cache.emplace(radial_key(grid, k), RadialFactors{});
  std::vector<long> keys;
  for (const auto& [key, v] : cache) keys.push_back(key);
  std::vector<RadialFactors> factors(keys.size());
  std::string failure;
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < keys.size(); ++i) {
    try {
      factors[i] = principal_radial_factors(spec, std::sqrt(static_cast<double>(keys[i])) / grid.half_period(), opt);
    } catch (const Error& e) {
#pragma omp critical
      failure = e.what();
    }
  }
  if (!failure.empty()) throw ComputationError(failure);
  for (std::size_t i = 0; i < keys.size(); ++i) cache[keys[i]] = factors[i];

  // Unit-coefficient symbol row.
  std::vector<cplx> unit(M);
  for (std::size_t k = 0; k < M; ++k) {
    const Point xi = grid.frequency(k);
    const double rho = norm(xi, spec.n);
    if (rho == 0.0) continue;
    const auto& f = cache[radial_key(grid, k)];
    const bool odd_aliased = grid.multi_index(k)[0] == grid.points() / 2;
    const double dir = odd_aliased ? 0.0 : xi[0] / rho;
    unit[k] = cplx(f.even, spec.skew * dir * f.odd);
  }

  SymbolField p;
  p.grid = grid;
  p.order = spec.alpha;
  p.tau = spec.tau;
  p.derivative_budget = spec.derivative_count();
  if (spec.x_independent()) {
    p.rows = 1;
    const double a = spec.coeff(Point{0.0, 0.0}, spec.n);
    p.values.resize(M);
    for (std::size_t k = 0; k < M; ++k) p.values[k] = a * unit[k];
  } else {
    p.rows = M;
    p.values.resize(M * M);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < M; ++i) {
      const double a = spec.coeff(grid.point(i), spec.n);
      for (std::size_t k = 0; k < M; ++k) p.values[i * M + k] = a * unit[k];
    }
  }
  return p;
}

std::vector<cplx> tail_symbol_table(const KernelSpec& spec, const TorusGrid& grid, const SymbolOptions& opt) {
  const std::size_t M = grid.size();
  std::vector<cplx> out(M, 0.0);
  if (!spec.has_tail()) return out;
  std::map<long, double> cache;
  for (std::size_t k = 0; k < M; ++k) cache.emplace(radial_key(grid, k), 0.0);
  std::vector<long> keys;
  for (const auto& [key, v] : cache) keys.push_back(key);
  std::vector<double> vals(keys.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < keys.size(); ++i)
    vals[i] = tail_symbol(spec, std::sqrt(static_cast<double>(keys[i])) / grid.half_period(), opt);
  for (std::size_t i = 0; i < keys.size(); ++i) cache[keys[i]] = vals[i];
  for (std::size_t k = 0; k < M; ++k) out[k] = cache[radial_key(grid, k)];
  return out;
}

// ---------------------------------------------------------------------------
// Symbol-class norm

namespace {

struct Stencil1 {
  std::vector<int> off;
  std::vector<double> w;
};

Stencil1 stencil(int order) {
  switch (order) {
    case 0: return {{0}, {1.0}};
    case 1: return {{-1, 1}, {-0.5, 0.5}};
    case 2: return {{-1, 0, 1}, {1.0, -2.0, 1.0}};
    case 3: return {{-2, -1, 1, 2}, {-0.5, 1.0, -1.0, 0.5}};
    default: throw ParameterError("symbol_class_norm: derivative order > 3 not supported");
  }
}

int stencil_reach(int order) { return order >= 3 ? 2 : (order >= 1 ? 1 : 0); }

// C^tau norm over the x-grid of a field given per grid point.
double x_holder_norm(const std::vector<cplx>& g, const TorusGrid& grid, double tau) {
  double sup = 0.0;
  for (const auto& v : g) sup = std::max(sup, std::abs(v));
  if (g.size() == 1) return sup;
  double q = 0.0;
  const int N = grid.points();
  for (int lag = 1; lag <= N / 2; lag *= 2) {
    const double denom = std::pow(lag * grid.spacing(), tau);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto m = grid.multi_index(i);
      for (int d = 0; d < grid.dim(); ++d) {
        auto mm = m;
        mm[d] += lag;
        q = std::max(q, std::abs(g[grid.flat(mm[0], mm[1])] - g[i]) / denom);
      }
    }
  }
  return sup + q;
}

}  // namespace

double symbol_class_norm(const SymbolField& p, double m) {
  const auto& grid = p.grid;
  const int n = grid.dim();
  const int N = grid.points();
  const int budget = p.derivative_budget;
  std::vector<std::array<int, 2>> betas;
  for (int a = 0; a <= budget; ++a) {
    if (n == 1) {
      betas.push_back({a, 0});
    } else {
      for (int b = 0; a + b <= budget; ++b) betas.push_back({a, b});
    }
  }
  int reach = 0;
  for (int o = 0; o <= budget; ++o) reach = std::max(reach, 2 * stencil_reach(o));
  const int limit = N / 2 - 1 - reach;
  if (limit < 1) throw ParameterError("symbol_class_norm: frequency grid too coarse for the difference stencil");

  std::vector<std::size_t> samples;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto mi = grid.multi_index(k);
    bool inside = std::abs(grid.signed_index(mi[0])) <= limit;
    if (n == 2) inside = inside && std::abs(grid.signed_index(mi[1])) <= limit;
    if (inside) samples.push_back(k);
  }
  if (n == 2 && !p.x_independent() && samples.size() > 512) {
    const std::size_t stride = (samples.size() + 511) / 512;
    std::vector<std::size_t> sub;
    for (std::size_t i = 0; i < samples.size(); i += stride) sub.push_back(samples[i]);
    samples.swap(sub);
  }

  const double h = 1.0 / grid.half_period();
  std::vector<double> best(samples.size(), 0.0);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t si = 0; si < samples.size(); ++si) {
    const std::size_t k = samples[si];
    const auto mi = grid.multi_index(k);
    const double rho = grid.frequency_norm(k);
    const double bracket = std::sqrt(1.0 + rho * rho);
    std::vector<cplx> g(p.rows);
    for (const auto& beta : betas) {
      const int order = beta[0] + beta[1];
      auto diff = [&](std::size_t row, int scale) {
        const Stencil1 s0 = stencil(beta[0]);
        const Stencil1 s1 = stencil(n == 2 ? beta[1] : 0);
        cplx acc{};
        for (std::size_t a = 0; a < s0.off.size(); ++a)
          for (std::size_t b = 0; b < s1.off.size(); ++b) {
            const std::size_t kk = grid.flat(mi[0] + scale * s0.off[a], mi[1] + scale * s1.off[b]);
            acc += s0.w[a] * s1.w[b] * p.at(row, kk);
          }
        return acc / std::pow(scale * h, order);
      };
      for (std::size_t row = 0; row < p.rows; ++row)
        g[row] = order == 0 ? p.at(row, k) : (4.0 * diff(row, 1) - diff(row, 2)) / 3.0;
      const double val = std::pow(bracket, order - m) * x_holder_norm(g, grid, p.tau);
      best[si] = std::max(best[si], val);
    }
  }
  return best.empty() ? 0.0 : *std::max_element(best.begin(), best.end());
}

// ---------------------------------------------------------------------------
// Sector geometry

bool SectorReport::admissible(cplx lambda) const {
  return valid && std::abs(lambda) >= R * (1.0 - 1e-12) && std::abs(std::arg(lambda)) <= delta_prime + 1e-12;
}

SectorReport sector_and_ellipticity(const SymbolField& p, double alpha) {
  const auto& grid = p.grid;
  const std::size_t M = grid.size();
  SectorReport rep;
  rep.c_ell = std::numeric_limits<double>::infinity();
  bool any_high = false;
  double worst_bad_rho = std::numeric_limits<double>::infinity();
  double max_abs = 0.0, low_sup = 0.0;
  for (std::size_t i = 0; i < p.rows; ++i) {
    for (std::size_t k = 0; k < M; ++k) {
      const cplx v = p.at(i, k);
      const double rho = grid.frequency_norm(k);
      max_abs = std::max(max_abs, std::abs(v));
      if (rho <= 1.0) low_sup = std::max(low_sup, std::abs(v));
      if (rho < 1.0) continue;
      any_high = true;
      const double ce = -v.real() / std::pow(rho, alpha);
      if (ce < rep.c_ell) {
        rep.c_ell = ce;
        rep.c_ell_argmin = grid.frequency(k);
      }
      if (v.real() >= 0.0) {
        rep.M_ratio = std::numeric_limits<double>::infinity();
        worst_bad_rho = std::min(worst_bad_rho, rho);
      } else {
        rep.M_ratio = std::max(rep.M_ratio, std::abs(v.imag() / v.real()));
      }
    }
  }
  if (!any_high) throw ParameterError("sector_and_ellipticity: no frequency with |xi| >= 1 on the grid");
  rep.valid = rep.c_ell > 0.0 && std::isfinite(rep.M_ratio);
  if (!rep.valid) {
    std::ostringstream os;
    os << "ellipticity fails: min(-Re p)/|xi|^alpha = " << rep.c_ell;
    if (std::isfinite(worst_bad_rho)) os << "; Re p >= 0 from |xi| = " << worst_bad_rho;
    rep.failure = os.str();
  }
  rep.delta = kPi - std::atan(rep.M_ratio);
  rep.delta_prime = 0.5 * (0.5 * kPi + rep.delta);

  // Sampled geometric constant between the two sectors.
  double cg = std::numeric_limits<double>::infinity();
  for (int a = 0; a <= 8; ++a) {
    const double tl = -rep.delta_prime + 2.0 * rep.delta_prime * a / 8.0;
    for (int b = 0; b <= 8; ++b) {
      const double tz = rep.delta + (kPi - rep.delta) * b / 8.0;
      for (int sgn : {-1, 1}) {
        for (int e = -80; e <= 80; ++e) {
          const double t = std::pow(2.0, e / 8.0);
          const cplx d = std::polar(1.0, tl) - std::polar(t, sgn * tz);
          cg = std::min(cg, std::abs(d) / std::max(1.0, t));
        }
      }
    }
  }
  rep.c_geom = cg;
  rep.c_delta_prime = rep.valid ? cg * std::min(1.0, rep.c_ell) : 0.5 * cg;

  // lambda-ray scan for the threshold.
  const double mu_min = 1e-3;
  const double mu_max = 8.0 * (max_abs + 1.0);
  std::vector<double> mags;
  for (double mu = mu_min; mu <= mu_max; mu *= std::pow(2.0, 0.25)) mags.push_back(mu);
  const double angles[] = {-rep.delta_prime, -0.5 * rep.delta_prime, 0.0, 0.5 * rep.delta_prime, rep.delta_prime};
  std::vector<char> pass(mags.size(), 1);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t j = 0; j < mags.size(); ++j) {
    for (double th : angles) {
      const cplx lam = std::polar(mags[j], th);
      for (std::size_t i = 0; i < p.rows && pass[j]; ++i) {
        for (std::size_t k = 0; k < M; ++k) {
          const double scale = std::max(mags[j], std::pow(grid.frequency_norm(k), alpha));
          if (std::abs(lam - p.at(i, k)) < rep.c_delta_prime * scale) {
            pass[j] = 0;
            break;
          }
        }
      }
    }
  }
  double r_scan = mags.back() * 2.0;
  for (std::size_t j = mags.size(); j-- > 0;) {
    if (!pass[j]) break;
    r_scan = mags[j];
  }
  rep.R_certified = std::max(r_scan, low_sup);
  rep.R = 2.0 * rep.R_certified;
  return rep;
}

std::string to_text(const SectorReport& r) {
  std::ostringstream os;
  os << std::setprecision(12);
  os << "valid=" << (r.valid ? "true" : "false") << '\n'
     << "M_ratio=" << r.M_ratio << '\n'
     << "delta=" << r.delta << '\n'
     << "delta_prime=" << r.delta_prime << '\n'
     << "c_ell=" << r.c_ell << '\n'
     << "c_ell_argmin=" << r.c_ell_argmin[0] << ',' << r.c_ell_argmin[1] << '\n'
     << "c_geom=" << r.c_geom << '\n'
     << "c_delta_prime=" << r.c_delta_prime << '\n'
     << "R_certified=" << r.R_certified << '\n'
     << "R=" << r.R << '\n';
  if (!r.failure.empty()) os << "failure=" << r.failure << '\n';
  return os.str();
}

SymbolField resolvent_symbol(const SymbolField& p, cplx lambda, const SectorReport& sector) {
  if (!sector.valid) throw PreconditionError("resolvent_symbol: sector report is not valid (" + sector.failure + ")");
  if (!sector.admissible(lambda) && std::abs(lambda) < sector.R * (1.0 - 1e-12)) {
    std::ostringstream os;
    os << "resolvent_symbol: |lambda| = " << std::abs(lambda) << " below admissible R = " << sector.R;
    throw PreconditionError(os.str());
  }
  if (std::abs(std::arg(lambda)) > sector.delta_prime + 1e-12) {
    std::ostringstream os;
    os << "resolvent_symbol: arg lambda = " << std::arg(lambda) << " outside the sector of half-angle "
       << sector.delta_prime;
    throw PreconditionError(os.str());
  }
  SymbolField q = p;
  q.order = -p.order;
  for (auto& v : q.values) {
    const cplx d = lambda - v;
    if (std::abs(d) < 1e-14) throw ComputationError("resolvent_symbol: lambda - p nearly singular");
    v = 1.0 / d;
  }
  return q;
}

void write_csv(std::ostream& os, const SymbolField& p) {
  const auto& g = p.grid;
  os << (g.dim() == 1 ? "x0,xi0,re,im\n" : "x0,x1,xi0,xi1,re,im\n") << std::setprecision(17);
  for (std::size_t i = 0; i < p.rows; ++i) {
    const Point x = g.point(i);
    for (std::size_t k = 0; k < g.size(); ++k) {
      const Point xi = g.frequency(k);
      const cplx v = p.at(i, k);
      if (g.dim() == 1)
        os << x[0] << ',' << xi[0] << ',' << v.real() << ',' << v.imag() << '\n';
      else
        os << x[0] << ',' << x[1] << ',' << xi[0] << ',' << xi[1] << ',' << v.real() << ',' << v.imag() << '\n';
    }
  }
}

}  // namespace levyop
