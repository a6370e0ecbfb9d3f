#include <cmath>

#include "doctest.h"
#include "levyop/errors.hpp"
#include "levyop/psdo_apply.hpp"
#include "levyop/resolvent.hpp"

using namespace levyop;

namespace {

GridFunction bump(const TorusGrid& g, double c = 0.0, double w = 0.5) {
  return GridFunction::sample_real(g, [=](const Point& x) { return std::exp(-(x[0] - c) * (x[0] - c) / (2 * w * w)); });
}

cplx inner(const GridFunction& a, const GridFunction& b) {
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * std::conj(b[i]);
  return s;
}

Coefficient holder_coefficient() {
  Coefficient c;
  c.kind = Coefficient::Kind::weierstrass;
  c.a1 = 0.2;
  return c;
}

}  // namespace

TEST_CASE("unit symbol is the identity in both forms") {
  const TorusGrid g(1, 1.0, 64);
  const GridFunction f = bump(g);
  const SymbolField one = SymbolField::constant(g, 1.0);
  CHECK((apply_xform(one, f) - f).max_abs() < 1e-12);
  CHECK((apply_yform(one, f) - f).max_abs() < 1e-12);
}

TEST_CASE("i xi differentiates") {
  const TorusGrid g(1, 1.0, 64);
  const auto f = GridFunction::sample_real(g, [](const Point& x) { return std::sin(x[0]); });
  const auto d = SymbolField::from_function(g, false, [](const Point&, const Point& xi) { return cplx(0, xi[0]); }, 1);
  const auto cosx = GridFunction::sample_real(g, [](const Point& x) { return std::cos(x[0]); });
  CHECK((apply_xform(d, f) - cosx).max_abs() < 1e-12);
}

TEST_CASE("-pi |xi| acts on cos x as -pi") {
  const TorusGrid g(1, 1.0, 64);
  const auto f = GridFunction::sample_real(g, [](const Point& x) { return std::cos(x[0]); });
  const auto p = SymbolField::from_function(g, false, [](const Point&, const Point& xi) { return cplx(-kPi * std::abs(xi[0]), 0); }, 1);
  CHECK((apply_xform(p, f) - cplx(-kPi, 0) * f).max_abs() < 1e-12);
}

TEST_CASE("x- and y-forms coincide for x-independent symbols") {
  const TorusGrid g(1, 1.0, 128);
  const SymbolField p = compute_symbol(KernelSpec::stable_like(1, 1.5, Coefficient{}), g);
  const GridFunction f = bump(g, 0.3);
  CHECK((apply_xform(p, f) - apply_yform(p, f)).max_abs() < 1e-12 * p.values.size());
}

TEST_CASE("adjoint identity between the y-form and the reflected conjugate x-form") {
  const TorusGrid g(1, 1.0, 64);
  const KernelSpec spec = KernelSpec::stable_like(1, 1.5, holder_coefficient());
  const auto gen = DiscreteGenerator::build(spec, g);
  const SymbolField q = resolvent_symbol(gen.p, 3.0 * gen.sector.R, gen.sector);
  const GridFunction f = bump(g, 0.2), h = bump(g, -0.7, 0.8);
  const cplx lhs = inner(apply_yform(q, f), h);
  const cplx rhs = inner(f, apply_xform(q.conjugated().reflected(), h));
  CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(lhs));
}

TEST_CASE("dense operators are linear") {
  const TorusGrid g(1, 1.0, 64);
  const SymbolField p = compute_symbol(KernelSpec::stable_like(1, 1.5, holder_coefficient()), g);
  const GridFunction a = bump(g, 0.1), b = bump(g, 1.0, 0.3);
  const cplx c(0.7, -0.2);
  const GridFunction lhs = apply_xform(p, a + c * b);
  const GridFunction rhs = apply_xform(p, a) + c * apply_xform(p, b);
  CHECK((lhs - rhs).max_abs() <= 1e-12 * lhs.max_abs());
}

TEST_CASE("serial references match the OpenMP kernels") {
  const TorusGrid g(1, 1.0, 64);
  const SymbolField p = compute_symbol(KernelSpec::stable_like(1, 1.5, holder_coefficient()), g);
  const GridFunction f = bump(g, 0.4);
  CHECK((apply_xform(p, f) - serial::apply_xform(p, f)).max_abs() <= 1e-12 * apply_xform(p, f).max_abs());
  CHECK((apply_yform(p, f) - serial::apply_yform(p, f)).max_abs() <= 1e-12 * apply_yform(p, f).max_abs());
}

TEST_CASE("direct quadrature matches the symbol route") {
  const TorusGrid g(1, 1.0, 128);
  for (const Coefficient& c : {Coefficient{}, holder_coefficient()}) {
    KernelSpec spec = KernelSpec::stable_like(1, 1.5, c);
    const auto f = GridFunction::sample_real(g, [](const Point& x) { return std::cos(x[0]); });
    const GridFunction direct = apply_L_direct(spec, f);
    const GridFunction sym = apply_xform(compute_symbol(spec, g), f);
    CHECK((direct - sym).max_abs() <= 1e-6 * sym.max_abs());
  }
}

TEST_CASE("direct quadrature in two dimensions with skew") {
  const TorusGrid g(2, 1.0, 32);
  KernelSpec spec = KernelSpec::stable_like(2, 1.2, Coefficient{});
  spec.skew = 0.3;
  const auto f = GridFunction::sample_real(g, [](const Point& x) { return std::cos(x[0]) * std::cos(2 * x[1]) + std::sin(x[1]); });
  const GridFunction direct = apply_L_direct(spec, f);
  const GridFunction sym = apply_xform(compute_symbol(spec, g), f);
  CHECK((direct - sym).max_abs() <= 1e-6 * sym.max_abs());
}

TEST_CASE("constants are annihilated and far-field values are positive") {
  const TorusGrid g(1, 3.0, 256);
  const KernelSpec spec = KernelSpec::stable_like(1, 1.5, Coefficient{});
  const auto one = GridFunction::sample_real(g, [](const Point&) { return 1.0; });
  CHECK(apply_L_direct(spec, one).max_abs() < 1e-12);
  const GridFunction f = bump(g, 0.0, 0.15);
  const GridFunction Lf = apply_L_direct(spec, f);
  // x = 1.2 is outside the bump but within reach of the kernel.
  const std::size_t idx = std::size_t(std::lround((1.2 + kPi * 3.0) / g.spacing()));
  CHECK(Lf[idx].real() > 0.0);
}

TEST_CASE("Schwartz kernel sums") {
  const std::vector<double> z{0.02, 0.03, 0.05, 0.08, 0.12, 0.2, 0.3, 0.5};
  SUBCASE("m = alpha = 1 decays like |z|^-2") {
    const KernelSpec spec = KernelSpec::stable_like(1, 1.0, Coefficient{});
    const auto t = schwartz_kernel_sum([spec](double xi) { return principal_radial_factors(spec, std::abs(xi)).even; }, 1.0, z);
    CHECK(kernel_decay_slope(t, 0.02, 0.5) == doctest::Approx(-2.0).epsilon(0.075));
    // Single shell: |k_5(z)| |z|^M / 2^{5(n+m-M)} stays bounded for M = 0, N.
    CHECK(shell_decay_constant(t, 5, 0.0) < 10.0);
    CHECK(shell_decay_constant(t, 5, 2.0) < 100.0);
  }
  SUBCASE("invalid input") {
    CHECK_THROWS_AS(schwartz_kernel_sum([](double) { return 1.0; }, -1.0, z), ParameterError);
    CHECK_THROWS_AS(schwartz_kernel_sum([](double) { return 1.0; }, 0.0, {0.0, 0.1}), ParameterError);
  }
}

TEST_CASE("remainder vanishes for constant coefficients and shrinks with lambda otherwise") {
  const TorusGrid g(1, 1.0, 128);
  const GridFunction f = bump(g);
  {
    const auto gen = DiscreteGenerator::build(KernelSpec::stable_like(1, 1.5, Coefficient{}), g);
    const SymbolField q = resolvent_symbol(gen.p, 2 * gen.sector.R, gen.sector);
    CHECK(remainder_operator_apply(gen.p, q, 2 * gen.sector.R, f).max_abs() <= 1e-8 * f.max_abs());
    CHECK(remainder_operator_apply(gen.p, q, 2 * gen.sector.R, GridFunction(g, Space::physical)).max_abs() == 0.0);
  }
  {
    const auto gen = DiscreteGenerator::build(KernelSpec::stable_like(1, 1.5, holder_coefficient()), g);
    const DyadicPartition part(g);
    auto rnorm = [&](double lam) {
      const SymbolField q = resolvent_symbol(gen.p, lam, gen.sector);
      return holder_zygmund_norm(remainder_operator_apply(gen.p, q, lam, f), 0.25, part);
    };
    CHECK(rnorm(4 * gen.sector.R) < rnorm(gen.sector.R));
  }
}
