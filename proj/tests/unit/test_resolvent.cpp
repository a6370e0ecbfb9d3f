#include <cmath>
#include <memory>

#include "doctest.h"
#include "levyop/errors.hpp"
#include "levyop/resolvent.hpp"

using namespace levyop;

namespace {

Coefficient holder_coefficient() {
  Coefficient c;
  c.kind = Coefficient::Kind::weierstrass;
  c.a1 = 0.2;
  return c;
}

std::shared_ptr<const DiscreteGenerator> make(const KernelSpec& spec, int N = 128) {
  return std::make_shared<const DiscreteGenerator>(DiscreteGenerator::build(spec, TorusGrid(1, 1.0, N)));
}

GridFunction bump(const TorusGrid& g) {
  return GridFunction::sample_real(g, [](const Point& x) { return std::exp(-2.0 * x[0] * x[0]); });
}

}  // namespace

TEST_CASE("zero data gives the zero solution") {
  const auto gen = make(KernelSpec::stable_like(1, 1.5, holder_coefficient()));
  const ResolventOperator res(gen, 2 * gen->sector.R);
  CHECK(res(GridFunction(gen->grid, Space::physical)).max_abs() == 0.0);
}

TEST_CASE("constant coefficients need a single term") {
  const KernelSpec spec = KernelSpec::stable_like(1, 1.5, Coefficient{});
  const auto gen = make(spec);
  const cplx lambda = 2 * gen->sector.R;
  const ResolventOperator res(gen, lambda);
  const GridFunction f = bump(gen->grid);
  const ResolventSolve sol = res.solve(f);
  CHECK(sol.iterations <= 1);
  CHECK(resolvent_defect(spec, lambda, sol.u, f) <= 1e-10);
}

TEST_CASE("Holder coefficient at 8R converges with a small defect") {
  const KernelSpec spec = KernelSpec::stable_like(1, 1.5, holder_coefficient());
  const auto gen = make(spec, 256);
  const cplx lambda = 8 * gen->sector.R;
  const ResolventSolve sol = ResolventOperator(gen, lambda).solve(bump(gen->grid));
  CHECK(sol.converged);
  CHECK(sol.iterations == 7);
  CHECK(resolvent_defect(spec, lambda, sol.u, bump(gen->grid)) <= 1e-8);
}

TEST_CASE("inadmissible lambda is a precondition error") {
  const auto gen = make(KernelSpec::stable_like(1, 1.5, holder_coefficient()));
  CHECK_THROWS_AS(ResolventOperator(gen, 0.5 * gen->sector.R), PreconditionError);
  CHECK_THROWS_AS(ResolventOperator(gen, cplx(-2.0 * gen->sector.R, 0.0)), PreconditionError);
}

TEST_CASE("probe basket is normalized") {
  const TorusGrid g(1, 1.0, 128);
  const auto probes = probe_basket(g, 0.25);
  CHECK(probes.size() == 12);
  const DyadicPartition part(g);
  for (const auto& f : probes) CHECK(holder_zygmund_norm(f, 0.25, part) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("generator bound slopes") {
  const auto gen = make(KernelSpec::stable_like(1, 1.5, holder_coefficient()));
  std::vector<cplx> lambdas;
  for (int k = 0; k <= 6; ++k) lambdas.emplace_back(gen->sector.R * std::ldexp(1.0, k), 0.0);
  const GeneratorReport r = generator_bound_scan(gen, lambdas, probe_basket(gen->grid), {0.0, 1.5});
  CHECK(r.slopes[0] == doctest::Approx(-1.0).epsilon(0.1));
  CHECK(std::abs(r.slopes[1]) <= 0.1);
  CHECK(r.M_gen > 0.0);
}

TEST_CASE("resolvent of a nonnegative bump is nonnegative") {
  const auto gen = make(KernelSpec::stable_like(1, 1.5, holder_coefficient()));
  const PositivityResult r = positivity_of_resolvent(gen, 2 * gen->sector.R, bump(gen->grid));
  CHECK(r.nonnegative);
  CHECK(positivity_of_resolvent(gen, 2 * gen->sector.R, GridFunction(gen->grid, Space::physical)).min_value == 0.0);
  const auto dip = GridFunction::sample_real(gen->grid, [](const Point& x) { return std::cos(x[0]); });
  CHECK_THROWS_AS(positivity_of_resolvent(gen, 2 * gen->sector.R, dip), PreconditionError);
}

TEST_CASE("loglog slope of an exact power") {
  CHECK(loglog_slope({1, 2, 4, 8}, {3, 3.0 / 4, 3.0 / 16, 3.0 / 64}) == doctest::Approx(-2.0));
}
