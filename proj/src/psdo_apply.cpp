#include "levyop/psdo_apply.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/special_functions/bessel.hpp>

#include "levyop/errors.hpp"
#include "levyop/quadrature.hpp"

namespace levyop {

namespace {

void require_same_grid(const SymbolField& p, const GridFunction& f) {
  if (!(p.grid == f.grid())) throw ParameterError("symbol and function live on different grids");
  if (f.space() != Space::physical) throw ParameterError("operator application expects a physical-space function");
}

std::vector<cplx> roots_of_unity(int N, int sign) {
  std::vector<cplx> w(N);
  for (int j = 0; j < N; ++j) w[j] = std::polar(1.0, sign * 2.0 * kPi * j / N);
  return w;
}

}  // namespace

GridFunction apply_xform(const SymbolField& p, const GridFunction& f) {
  require_same_grid(p, f);
  const auto& g = p.grid;
  const GridFunction F = f.to_frequency();
  if (p.x_independent()) {
    GridFunction s = F;
    for (std::size_t k = 0; k < g.size(); ++k) s[k] *= p.values[k];
    return s.to_physical();
  }
  const int N = g.points();
  const std::size_t M = g.size();
  const auto w = roots_of_unity(N, +1);
  std::vector<cplx> out(M);
  const double scale = 1.0 / static_cast<double>(M);
  if (g.dim() == 1) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < N; ++i) {
      const cplx* row = p.row(i);
      cplx acc{};
      int ph = 0;
      for (int k = 0; k < N; ++k) {
        acc += w[ph] * row[k] * F[k];
        ph += i;
        if (ph >= N) ph %= N;
      }
      out[i] = acc * scale;
    }
  } else {
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < M; ++i) {
      const int i0 = static_cast<int>(i / N), i1 = static_cast<int>(i % N);
      const cplx* row = p.row(i);
      cplx acc{};
      for (int k0 = 0; k0 < N; ++k0) {
        const int base = (i0 * k0) % N;
        int ph = base;
        const std::size_t off = static_cast<std::size_t>(k0) * N;
        for (int k1 = 0; k1 < N; ++k1) {
          acc += w[ph] * row[off + k1] * F[off + k1];
          ph += i1;
          if (ph >= N) ph %= N;
        }
      }
      out[i] = acc * scale;
    }
  }
  return GridFunction(g, Space::physical, std::move(out));
}

GridFunction apply_yform(const SymbolField& q, const GridFunction& f) {
  require_same_grid(q, f);
  const auto& g = q.grid;
  if (q.x_independent()) return apply_xform(q, f);
  const int N = g.points();
  const std::size_t M = g.size();
  const auto w = roots_of_unity(N, -1);
  GridFunction G(g, Space::frequency);
  if (g.dim() == 1) {
#pragma omp parallel for schedule(static)
    for (int k = 0; k < N; ++k) {
      cplx acc{};
      int ph = 0;
      for (int j = 0; j < N; ++j) {
        acc += w[ph] * q.values[static_cast<std::size_t>(j) * M + k] * f[j];
        ph += k;
        if (ph >= N) ph %= N;
      }
      G[k] = acc;
    }
  } else {
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < M; ++k) {
      const int k0 = static_cast<int>(k / N), k1 = static_cast<int>(k % N);
      cplx acc{};
      for (int j0 = 0; j0 < N; ++j0) {
        int ph = (j0 * k0) % N;
        const std::size_t off = static_cast<std::size_t>(j0) * N;
        for (int j1 = 0; j1 < N; ++j1) {
          acc += w[ph] * q.values[(off + j1) * M + k] * f[off + j1];
          ph += k1;
          if (ph >= N) ph %= N;
        }
      }
      G[k] = acc;
    }
  }
  return G.to_physical();
}

// ---------------------------------------------------------------------------
// Direct quadrature of L

namespace {

// J0(x) - 1 without cancellation for small x.
double bessel_j0_minus_one(double x) {
  if (x > 1.0) return boost::math::cyl_bessel_j(0, x) - 1.0;
  const double q = 0.25 * x * x;
  double term = -q, sum = 0.0;
  for (int m = 1; m < 30 && std::abs(term) > 1e-18 * std::abs(sum); ++m) {
    sum += term;
    term *= -q / ((m + 1.0) * (m + 1.0));
  }
  return sum;
}

struct DirectRules {
  QuadratureRule compensated;  // nodes in (0, 2]
  QuadratureRule tail;         // nodes in (2, Y]
};

DirectRules direct_rules(const KernelSpec& spec, double xi_max, int level, double panel_factor, double tol) {
  DirectRules r;
  const double rho0 = std::min(1.0, 1.0 / xi_max);
  const double panel = panel_factor * kPi / xi_max;
  r.compensated = tanh_sinh_rule(0.0, rho0, level);
  if (rho0 < 1.0) r.compensated.append(composite_gauss_legendre(rho0, 1.0, panel));
  r.compensated.append(composite_gauss_legendre(1.0, 2.0, panel));
  if (spec.has_tail()) {
    // Beyond Y the tail contributes below a thousandth of the tolerance.
    const double mass = (spec.n == 1 ? 2.0 : 2.0 * kPi) * spec.c2 * 2.0;
    const double y_max = std::max(3.0, std::log(mass / (1e-3 * tol)));
    r.tail = composite_gauss_legendre(2.0, y_max, std::max(panel, 1e-3));
  }
  return r;
}

GridFunction direct_pass(const KernelSpec& spec, const GridFunction& f, const GridFunction& F,
                         const DirectRules& rules) {
  const auto& g = f.grid();
  const std::size_t M = g.size();
  const int n = g.dim();
  const bool comp = spec.compensated();
  const int N = g.points();
  std::vector<Point> xs(M), xis(M);
  std::vector<char> odd_alias(M);
  for (std::size_t i = 0; i < M; ++i) {
    xs[i] = g.point(i);
    xis[i] = g.frequency(i);
    odd_alias[i] = g.multi_index(i)[0] == N / 2;
  }
  std::vector<cplx> acc(M, 0.0);

  auto node = [&](double r, double w, bool inside) {
    const double c = (comp && inside) ? 1.0 : 0.0;
    GridFunction s0(g, Space::frequency), s1(g, Space::frequency);
    for (std::size_t k = 0; k < M; ++k) {
      const Point& xi = xis[k];
      if (n == 1) {
        const double x = r * xi[0];
        s0[k] = -2.0 * one_minus_cos(x) * F[k];
        const double odd = c != 0.0 ? -x_minus_sin(x) : std::sin(x);
        s1[k] = odd_alias[k] ? cplx{} : cplx(0.0, 2.0 * odd) * F[k];
      } else {
        const double rho = norm(xi, 2);
        if (rho == 0.0) continue;
        const double x = r * rho;
        const double j0m1 = bessel_j0_minus_one(x);
        const double j1 = boost::math::cyl_bessel_j(1, x);
        const double odd = j1 - c * 0.5 * x;
        s0[k] = 2.0 * kPi * j0m1 * F[k];
        s1[k] = odd_alias[k] ? cplx{} : cplx(0.0, 2.0 * kPi * (xi[0] / rho) * odd) * F[k];
      }
    }
    const GridFunction e = s0.to_physical();
    const GridFunction o = s1.to_physical();
    const Point yp{r, 0.0}, ym{-r, 0.0};
    const double jac = n == 1 ? 1.0 : r;
    for (std::size_t i = 0; i < M; ++i) {
      const double kp = eval_kernel(spec, xs[i], yp);
      const double km = eval_kernel(spec, xs[i], ym);
      if (n == 1) {
        acc[i] += w * 0.5 * (e[i] * (kp + km) + o[i] * (kp - km));
      } else {
        // Angular structure A0 + A1 cos(theta) of the built-in families.
        acc[i] += w * jac * (0.5 * (kp + km) * e[i] + 0.5 * (kp - km) * o[i]);
      }
    }
  };
  for (std::size_t q = 0; q < rules.compensated.size(); ++q)
    node(rules.compensated.nodes[q], rules.compensated.weights[q], true);
  for (std::size_t q = 0; q < rules.tail.size(); ++q) node(rules.tail.nodes[q], rules.tail.weights[q], false);
  return GridFunction(g, Space::physical, std::move(acc));
}

}  // namespace

GridFunction apply_L_direct(const KernelSpec& spec, const GridFunction& f, const DirectOptions& opt) {
  spec.validate();
  if (f.space() != Space::physical) throw ParameterError("apply_L_direct expects a physical-space function");
  if (spec.n != f.grid().dim()) throw ParameterError("kernel and grid dimensions differ");
  if (spec.k1_family == KernelSpec::PrincipalFamily::stable_fullspace)
    throw ParameterError("apply_L_direct needs a compactly supported k1");
  const GridFunction F = f.to_frequency();
  const double xi_max = std::max(1.0, f.grid().max_frequency());
  const double f_scale = f.max_abs();
  const auto fine_rules = direct_rules(spec, xi_max, opt.inner_level + 1, 0.5 * opt.panel_factor, opt.tol);
  GridFunction fine = direct_pass(spec, f, F, fine_rules);
  if (!opt.check) return fine;
  const auto coarse_rules = direct_rules(spec, xi_max, opt.inner_level, opt.panel_factor, opt.tol);
  const GridFunction coarse = direct_pass(spec, f, F, coarse_rules);
  double diff = 0.0;
  for (std::size_t i = 0; i < fine.size(); ++i) diff = std::max(diff, std::abs(fine[i] - coarse[i]));
  const double scale = fine.max_abs() + f_scale;
  if (diff > opt.tol * scale) {
    std::ostringstream os;
    os << "apply_L_direct: coarse/fine quadrature disagree by " << diff << " (tolerance " << opt.tol * scale << ")";
    throw ComputationError(os.str());
  }
  return fine;
}

GridFunction remainder_operator_apply(const SymbolField& p, const SymbolField& q, cplx lambda, const GridFunction& f,
                                      const std::vector<cplx>& tail) {
  if (!(p.grid == q.grid)) throw ParameterError("remainder: symbols live on different grids");
  const GridFunction g = apply_yform(q, f);
  GridFunction out = f;
  out -= lambda * g;
  out += apply_xform(p, g);
  if (!tail.empty()) out += apply_multiplier(g, tail);
  return out;
}

}  // namespace levyop
