#include <cmath>
#include <filesystem>
#include <memory>

#include "doctest.h"
#include "levyop/cauchy_solver.hpp"
#include "levyop/errors.hpp"

using namespace levyop;

namespace {

std::shared_ptr<const DiscreteGenerator> make(const KernelSpec& spec, int N = 64) {
  return std::make_shared<const DiscreteGenerator>(DiscreteGenerator::build(spec, TorusGrid(1, 1.0, N)));
}

// Mode-one multiplier of the x-independent kernel, read off the generator.
double mode_one(const DiscreteGenerator& gen) { return gen.p.at(0, 1).real(); }

}  // namespace

TEST_CASE("zero forcing and zero data stay zero") {
  CauchyProblem prob;
  prob.generator = make(KernelSpec::stable_like(1, 1.5, Coefficient{}));
  prob.steps = 16;
  const Trajectory tr = solve_cauchy(prob);
  for (const auto& u : tr.states) CHECK(u.max_abs() == 0.0);
}

TEST_CASE("homogeneous single mode decays at the symbol rate") {
  const auto gen = make(KernelSpec::stable_like(1, 1.0, Coefficient{}));
  const double a = mode_one(*gen);
  const auto cosx = GridFunction::sample_real(gen->grid, [](const Point& x) { return std::cos(x[0]); });
  const int steps = 64;
  const Trajectory tr = solve_homogeneous(gen, cosx, 1.0, steps);
  // Backward Euler is exact for its own recursion: (1 - a dt)^{-steps}.
  const double expected = std::pow(1.0 - a / steps, -steps);
  CHECK((tr.states.back() - cplx(expected, 0) * cosx).max_abs() < 1e-12);
}

TEST_CASE("backward problem against the scalar oracle") {
  const auto gen = make(KernelSpec::stable_like(1, 1.0, Coefficient{}));
  const double a = mode_one(*gen);
  const auto cosx = GridFunction::sample_real(gen->grid, [](const Point& x) { return std::cos(x[0]); });
  const double T = 1.0;
  const Trajectory tr = solve_backward(gen, [](double) { return 1.0; }, cosx, T, 512);
  CHECK(tr.states.back().max_abs() == 0.0);
  CHECK(tr.times.front() == 0.0);
  // V' + a V = 1, V(T) = 0.
  const double V0 = (1.0 - std::exp(a * T)) / a;
  CHECK((tr.states.front() - cplx(V0, 0) * cosx).max_abs() < 2e-3 * std::abs(V0));
}

TEST_CASE("linearity in the forcing") {
  const auto gen = make(KernelSpec::stable_like(1, 1.5, Coefficient{}));
  const auto f1 = GridFunction::sample_real(gen->grid, [](const Point& x) { return std::exp(-x[0] * x[0]); });
  const auto f2 = GridFunction::sample_real(gen->grid, [](const Point& x) { return std::sin(2 * x[0]); });
  auto run = [&](std::function<GridFunction(double)> f) {
    CauchyProblem p;
    p.generator = gen;
    p.forcing = std::move(f);
    p.steps = 32;
    return solve_cauchy(p).states.back();
  };
  const GridFunction sum = run([&](double t) { return cplx(t, 0) * f1 + cplx(2.0, 0) * f2; });
  const GridFunction parts = run([&](double t) { return cplx(t, 0) * f1; }) + cplx(2.0, 0) * run([&](double) { return f2; });
  CHECK((sum - parts).max_abs() < 1e-12 * sum.max_abs());
}

TEST_CASE("nonzero initial forcing is rejected on request") {
  CauchyProblem prob;
  prob.generator = make(KernelSpec::stable_like(1, 1.5, Coefficient{}));
  prob.forcing = [&](double) { return GridFunction::sample_real(prob.generator->grid, [](const Point&) { return 1.0; }); };
  prob.require_f0_zero = true;
  CHECK_THROWS_AS(solve_cauchy(prob), PreconditionError);
}

TEST_CASE("step size must give an admissible lambda") {
  CauchyProblem prob;
  prob.generator = make(KernelSpec::stable_like(1, 1.5, Coefficient{}));
  prob.steps = 1;
  prob.T = 10.0;
  CHECK_THROWS_AS(solve_cauchy(prob), PreconditionError);
}

TEST_CASE("regularity of zero and of a rough mode") {
  const auto gen = make(KernelSpec::stable_like(1, 1.5, Coefficient{}), 128);
  CauchyProblem prob;
  prob.generator = gen;
  prob.steps = 8;
  const RegularityReport zero = regularity_report(solve_cauchy(prob), 0.25, 1.5);
  CHECK(zero.max_norm_s_alpha == 0.0);
  // Forcing concentrated on shell j: C^s norms scale like 2^{j s}.
  auto norm_for = [&](int k) {
    prob.forcing = [&, k](double t) {
      return GridFunction::sample_real(gen->grid, [=](const Point& x) { return std::min(1.0, t) * std::cos(k * x[0]); });
    };
    return regularity_report(solve_cauchy(prob), 0.25, 1.5).norm_s.back();
  };
  const double lo = norm_for(8), hi = norm_for(32);
  // u ~ f / |p(k)|, so the C^s norm scales like 2^{j(s - alpha)}.
  CHECK(hi / lo == doctest::Approx(std::pow(4.0, 0.25 - 1.5)).epsilon(0.5));
}

TEST_CASE("trajectory export lists its files") {
  CauchyProblem prob;
  prob.generator = make(KernelSpec::stable_like(1, 1.5, Coefficient{}), 16);
  prob.steps = 2;
  prob.T = 0.1;
  const auto dir = std::filesystem::temp_directory_path() / "levyop_traj_test";
  std::filesystem::remove_all(dir);
  const auto files = export_trajectory(solve_cauchy(prob), dir, "u");
  CHECK(files.size() >= 3);
  for (const auto& f : files) CHECK(std::filesystem::exists(dir / f));
  std::filesystem::remove_all(dir);
}
