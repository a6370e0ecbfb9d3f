// Acceptance harness: one PASS/FAIL line per criterion with the measured
// values and wall time.  `acceptance 3 7` runs a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "levyop/cauchy_solver.hpp"
#include "levyop/errors.hpp"
#include "levyop/jump_process.hpp"
#include "levyop/kernel_model.hpp"
#include "levyop/path_space.hpp"
#include "levyop/psdo_apply.hpp"
#include "levyop/quadrature.hpp"
#include "levyop/resolvent.hpp"
#include "levyop/spectral_grid.hpp"
#include "levyop/symbol_calculus.hpp"

using namespace levyop;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

class Detail {
 public:
  template <class T>
  Detail& operator()(const std::string& key, T value) {
    os_ << (first_ ? "" : " ") << key << "=" << value;
    first_ = false;
    return *this;
  }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
  bool first_ = true;
};

double sup_norm(const GridFunction& f) { return f.max_abs(); }

// Holder fixture shared by the resolvent, Cauchy and simulation criteria.
Coefficient weierstrass_coefficient() {
  Coefficient c;
  c.kind = Coefficient::Kind::weierstrass;
  c.a0 = 1.0;
  c.a1 = 0.2;
  c.holder = 0.7;
  c.terms = 4;
  return c;
}

KernelSpec holder_spec(double alpha) { return KernelSpec::stable_like(1, alpha, weierstrass_coefficient()); }

std::shared_ptr<const DiscreteGenerator> build_generator(const KernelSpec& spec, const TorusGrid& grid) {
  return std::make_shared<const DiscreteGenerator>(DiscreteGenerator::build(spec, grid));
}

// Independent pi: int_R (1 - cos u)/u^2 du as Gauss-Legendre over whole
// periods of [0, 2 pi K] plus the asymptotic tail 1/X - 2/X^3 (the cosine
// part of the tail is O(X^-2) and averages out at X = 2 pi K).
double pi_oracle() {
  const int K = 400;
  const double X = 2.0 * kPi * K;
  const auto rule = composite_gauss_legendre(0.0, X, 0.5);
  double s = rule.integrate([](double u) {
    if (u < 1e-4) return 0.5 - u * u / 24.0;
    return one_minus_cos(u) / (u * u);
  });
  s += 1.0 / X - 2.0 / (X * X * X);
  return 2.0 * s;
}

Verdict criterion_1() {
  const double pi_q = pi_oracle();
  KernelSpec spec = KernelSpec::stable_like(1, 1.0, Coefficient{});
  spec.k1_family = KernelSpec::PrincipalFamily::stable_fullspace;
  double worst = 0.0;
  for (double xi : {1.0, 2.0, 4.0, 8.0}) {
    const double p = principal_symbol(spec, {0.0, 0.0}, {xi, 0.0}).real();
    worst = std::max(worst, std::abs(p + pi_q * xi) / (pi_q * xi));
  }
  const double pi_err = std::abs(pi_q - kPi);
  return {pi_err < 1e-9 && worst <= 1e-6, Detail()("pi_oracle_err", pi_err)("max_rel_err", worst).str()};
}

Verdict criterion_2() {
  const KernelSpec spec = holder_spec(1.5);
  const TorusGrid g128(1, 1.0, 128), g256(1, 1.0, 256);
  const SymbolField p128 = compute_symbol(spec, g128), p256 = compute_symbol(spec, g256);
  const double n128 = symbol_class_norm(p128, 1.5), n256 = symbol_class_norm(p256, 1.5);
  const double drift = std::abs(n256 / n128 - 1.0);

  std::vector<double> x, y;
  for (int N : {64, 128, 256, 512}) {
    const TorusGrid g(1, 1.0, N);
    const SymbolField p = N == 128 ? p128 : N == 256 ? p256 : compute_symbol(spec, g);
    x.push_back(std::sqrt(1.0 + g.max_frequency() * g.max_frequency()));
    y.push_back(symbol_class_norm(p, 1.0));
  }
  const double slope = loglog_slope(x, y);
  const bool pass = drift <= 0.05 && std::abs(slope - 0.5) <= 0.1;
  return {pass, Detail()("norm128", n128)("norm256", n256)("rel_change", drift)("m1_slope", slope).str()};
}

Verdict criterion_3() {
  const KernelSpec spec = KernelSpec::stable_like(1, 1.5, Coefficient{});
  const TorusGrid grid(1, 1.0, 256);
  const auto gen = build_generator(spec, grid);
  const double R = gen->sector.R;
  const ResolventOperator res(gen, cplx(2.0 * R, 0.0));
  double worst = 0.0;
  for (const auto& f : probe_basket(grid)) worst = std::max(worst, sup_norm(res.remainder(f)) / sup_norm(f));
  return {worst <= 1e-8, Detail()("R", R)("max_remainder_ratio", worst).str()};
}

Verdict criterion_4() {
  const KernelSpec spec = holder_spec(1.5);
  const TorusGrid grid(1, 1.0, 256);
  const auto gen = build_generator(spec, grid);
  const cplx lambda(8.0 * gen->sector.R, 0.0);
  const ResolventOperator res(gen, lambda);
  int worst_iter = 0;
  double worst_defect = 0.0;
  bool converged = true;
  for (const auto& f : probe_basket(grid)) {
    const ResolventSolve sol = res.solve(f);
    converged = converged && sol.converged;
    worst_iter = std::max(worst_iter, sol.iterations);
    worst_defect = std::max(worst_defect, resolvent_defect(spec, lambda, sol.u, f));
  }
  const bool pass = converged && worst_iter <= 15 && worst_defect <= 1e-7;
  return {pass, Detail()("R", gen->sector.R)("max_iterations", worst_iter)("max_defect", worst_defect).str()};
}

Verdict criterion_5() {
  const KernelSpec spec = holder_spec(1.5);
  const TorusGrid grid(1, 1.0, 256);
  const auto gen = build_generator(spec, grid);
  const double R = gen->sector.R;
  const auto probes = probe_basket(grid);
  const std::vector<double> aps{0.0, spec.alpha};
  std::vector<cplx> real_ray, sector_ray;
  const double angle = gen->sector.delta_prime - 0.1;
  for (int k = 0; k <= 6; ++k) {
    const double r = R * std::ldexp(1.0, k);
    real_ray.emplace_back(r, 0.0);
    sector_ray.push_back(std::polar(r, angle));
  }
  const GeneratorReport on_axis = generator_bound_scan(gen, real_ray, probes, aps);
  const GeneratorReport on_sector = generator_bound_scan(gen, sector_ray, probes, aps);
  const double s0 = on_axis.slopes[0], s1 = on_axis.slopes[1];
  const double ray_gap = std::max(std::abs(on_sector.slopes[0] - s0), std::abs(on_sector.slopes[1] - s1));
  const bool pass = std::abs(s0 + 1.0) <= 0.1 && std::abs(s1) <= 0.1 && ray_gap <= 0.15;
  return {pass, Detail()("slope_a0", s0)("slope_aalpha", s1)("ray_slope_a0", on_sector.slopes[0])(
                    "ray_slope_aalpha", on_sector.slopes[1])("ray_angle", angle)
                    .str()};
}

Verdict criterion_6() {
  const KernelSpec spec = holder_spec(1.5);
  const TorusGrid grid(1, 1.0, 256);
  const auto gen = build_generator(spec, grid);
  const cplx lambda(4.0 * gen->sector.R, 0.0), mu(8.0 * gen->sector.R, 0.0);
  const ResolventOperator rl(gen, lambda), rm(gen, mu);
  double worst = 0.0;
  for (const auto& f : probe_basket(grid)) {
    const GridFunction rmf = rm(f);
    const GridFunction gap = rl(f) - rmf - (mu - lambda) * rl(rmf);
    worst = std::max(worst, sup_norm(gap) / sup_norm(f));
  }
  return {worst <= 1e-6, Detail()("max_identity_gap", worst).str()};
}

// Symbol of the truncated alpha = 1 kernel at xi = 1, by quadrature in test
// code: -2 int_0^2 (1 - cos y) y^{-2} chi(y) dy.
double truncated_alpha1_symbol_at_one() {
  const auto rule = composite_gauss_legendre(0.0, 2.0, 0.05);
  return -2.0 * rule.integrate([](double y) { return one_minus_cos(y) / (y * y) * unit_ramp(y); });
}

Verdict criterion_7() {
  Detail d;
  bool pass = true;

  // Duhamel oracle for f = sin(t) cos(x) under the constant-coefficient
  // alpha = 1 kernel: u = U(t) cos x with U' = a U + sin t, U(0) = 0.
  {
    const KernelSpec spec = KernelSpec::stable_like(1, 1.0, Coefficient{});
    const TorusGrid grid(1, 1.0, 64);
    const auto gen = build_generator(spec, grid);
    const double a = truncated_alpha1_symbol_at_one();
    const double T = 1.0;
    const double U = (std::exp(a * T) - a * std::sin(T) - std::cos(T)) / (1.0 + a * a);
    const GridFunction cosx = GridFunction::sample_real(grid, [](const Point& x) { return std::cos(x[0]); });
    std::vector<double> dts, errs;
    for (int steps = 32; steps <= 512; steps *= 2) {
      CauchyProblem prob;
      prob.generator = gen;
      prob.forcing = [&](double t) { return cplx(std::sin(t), 0.0) * cosx; };
      prob.T = T;
      prob.steps = steps;
      const Trajectory tr = solve_cauchy(prob);
      const GridFunction exact = cplx(U, 0.0) * cosx;
      dts.push_back(T / steps);
      errs.push_back(sup_norm(tr.states.back() - exact));
    }
    const double order = loglog_slope(dts, errs);
    pass = pass && order >= 0.8 && order <= 1.2;
    d("oracle_order", order)("oracle_err_min", errs.back());
  }

  // Self-convergence, positivity and the C^{s+alpha} norm for the Holder spec.
  const KernelSpec spec = holder_spec(1.5);
  const double s = 0.25;
  auto make_problem = [&](const TorusGrid& grid, int steps) {
    const GridFunction bump = GridFunction::sample_real(grid, [](const Point& x) {
      return std::exp(-2.0 * x[0] * x[0]);
    });
    CauchyProblem prob;
    prob.generator = build_generator(spec, grid);
    prob.forcing = [bump](double t) { return cplx(std::min(1.0, 4.0 * t), 0.0) * bump; };
    prob.T = 1.0;
    prob.steps = steps;
    prob.s = s;
    return prob;
  };
  {
    const TorusGrid grid(1, 1.0, 256);
    std::vector<GridFunction> finals;
    std::vector<double> dts;
    double min_ratio = 1e300;
    for (int steps = 32; steps <= 512; steps *= 2) {
      const Trajectory tr = solve_cauchy(make_problem(grid, steps));
      for (const auto& u : tr.states) min_ratio = std::min(min_ratio, u.min_real() / tr.max_forcing);
      finals.push_back(tr.states.back());
      dts.push_back(1.0 / steps);
    }
    std::vector<double> gaps;
    for (std::size_t i = 0; i + 1 < finals.size(); ++i) gaps.push_back(sup_norm(finals[i] - finals[i + 1]));
    dts.pop_back();
    const double order = loglog_slope(dts, gaps);
    pass = pass && order >= 0.8 && order <= 1.2 && min_ratio >= -1e-10;
    d("self_order", order)("min_u_over_f", min_ratio);
  }
  {
    const Trajectory coarse = solve_cauchy(make_problem(TorusGrid(1, 1.0, 128), 64));
    const Trajectory fine = solve_cauchy(make_problem(TorusGrid(1, 1.0, 256), 64));
    const double a = regularity_report(coarse, s, spec.alpha).max_norm_s_alpha;
    const double b = regularity_report(fine, s, spec.alpha).max_norm_s_alpha;
    const double change = std::abs(b / a - 1.0);
    pass = pass && change <= 0.10;
    d("norm_s_alpha_128", a)("norm_s_alpha_256", b)("rel_change", change);
  }
  return {pass, d.str()};
}

Verdict criterion_8() {
  const KernelSpec spec = KernelSpec::stable_like(1, 1.0, Coefficient{});
  auto symbol = [spec](double xi) { return principal_radial_factors(spec, std::abs(xi)).even; };
  std::vector<double> z;
  for (int i = 0; i <= 24; ++i) z.push_back(0.02 * std::pow(25.0, i / 24.0));
  const SchwartzKernelTable t = schwartz_kernel_sum(symbol, 1.0, z);
  const double slope = kernel_decay_slope(t, 0.02, 0.5);
  const int N = spec.derivative_count();
  Detail d;
  d("slope", slope);
  bool uniform_ok = true;
  for (double M : {0.0, double(N)}) {
    double lo = 1e300, hi = 0.0;
    for (int j = 3; j <= 8; ++j) {
      const double c = shell_decay_constant(t, j, M);
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    // The bound holds uniformly in j iff the normalized constants stay
    // within a fixed band.
    const bool ok = std::isfinite(hi) && lo > 0.0 && hi / lo <= 4.0;
    uniform_ok = uniform_ok && ok;
    d("M" + std::to_string(int(M)) + "_Cmax", hi)("M" + std::to_string(int(M)) + "_spread", hi / lo);
  }
  return {std::abs(slope + 2.0) <= 0.15 && uniform_ok, d.str()};
}

// Monte Carlo criteria: the simulated process lives on R while the grid
// objects are periodic; the coefficient has integer frequencies, so reducing
// the path modulo the period does not change the law of anything evaluated.

GridFunction gaussian(const TorusGrid& grid, double sigma) {
  return GridFunction::sample_real(grid, [sigma](const Point& x) {
    return std::exp(-0.5 * x[0] * x[0] / (sigma * sigma));
  });
}

Verdict criterion_9() {
  const KernelSpec spec = holder_spec(0.8);
  const TorusGrid grid(1, 3.0, 256);
  const GridFunction phi = gaussian(grid, 1.0);
  const auto phi_at = std::make_shared<const PeriodicInterpolant>(phi);
  const auto phi_fn = [phi_at](const Point& x) { return (*phi_at)(x); };

  SimRequest req;
  req.T = 1.0;
  req.checkpoints = {0.25, 0.5, 1.0};
  req.n_paths = 200000;
  req.seed = 901;
  req.integrands = {generator_integrand(spec, phi)};
  const InitialLaw init = InitialLaw::point_mass({0.3, 0.0});

  SimScheme scheme;
  scheme.epsilon = 0.002;
  const PathEnsemble ens = simulate_paths(spec, init, scheme, req);
  MartingaleReport rep = martingale_residual(ens, phi_fn, 0);
  MartingaleOptions wrong;
  wrong.scale = 1.2;
  const MartingaleReport perturbed = martingale_residual(ens, phi_fn, 0, wrong);

  // Discretization bias: the same test at twice the cutoff, half the paths.
  SimScheme coarse = scheme;
  coarse.epsilon = 2.0 * scheme.epsilon;
  SimRequest creq = req;
  creq.n_paths = req.n_paths / 2;
  creq.seed = req.seed + 1;
  const MartingaleReport crep = martingale_residual(simulate_paths(spec, init, coarse, creq), phi_fn, 0);
  record_scheme_bias(rep, crep);

  double max_orth = 0.0;
  for (const auto& o : rep.orthogonality) max_orth = std::max(max_orth, o.estimate.z());
  double max_mean = 0.0;
  for (const auto& m : rep.mean_M) max_mean = std::max(max_mean, m.z());
  const bool pass = rep.passed && perturbed.max_z > 5.0;
  return {pass, Detail()("paths", ens.size())("max_mean_z", max_mean)("max_orth_z", max_orth)(
                    "perturbed_z", perturbed.max_z)("E_M_T", rep.mean_M.back().mean)("se_T", rep.mean_M.back().se)(
                    "scheme_bias", rep.scheme_bias)
                    .str()};
}

Verdict criterion_10() {
  const double alpha = 1.5;
  const KernelSpec spec = holder_spec(alpha);
  const TorusGrid grid(1, 1.0, 256);
  const GridFunction psi = gaussian(grid, 1.0);
  const double t = 0.5;
  const Trajectory pde = solve_homogeneous(build_generator(spec, grid), psi, t, 256);

  std::vector<Point> probes;
  for (int i = 0; i < 8; ++i) probes.push_back({-kPi + 2.0 * kPi * i / 8.0, 0.0});
  SimRequest req;
  req.T = t;
  req.checkpoints = {t};
  req.n_paths = 200000;
  req.seed = 1001;
  const InitialLaw init = InitialLaw::probe_set(probes);
  SimScheme scheme;
  scheme.epsilon = 0.02;
  const McPdeTable table = mc_vs_pde(simulate_paths(spec, init, scheme, req), psi, t, pde, 0.0);

  // Bias part of the error: the same probes under eps / 2.
  SimScheme fine = scheme;
  fine.epsilon = 0.5 * scheme.epsilon;
  req.seed += 1;
  const McPdeTable ftable = mc_vs_pde(simulate_paths(spec, init, fine, req), psi, t, pde, 0.0);
  double bias = 0.0;
  for (std::size_t i = 0; i < table.rows.size(); ++i)
    bias = std::max(bias, std::abs(table.rows[i].mc.mean - ftable.rows[i].mc.mean));

  const bool pass = table.max_error <= 5e-2;
  return {pass, Detail()("alpha", alpha)("max_error", table.max_error)("max_se", table.max_se)(
                    "scheme_bias_eps_half", bias)("fine_max_error", ftable.max_error)
                    .str()};
}

Verdict criterion_11() {
  const KernelSpec spec = holder_spec(1.5);
  const InitialLaw init = InitialLaw::point_mass({0.0, 0.0});
  SimRequest req;
  req.T = 1.0;
  req.checkpoints = {1.0};
  req.n_paths = 100000;
  auto run = [&](double eps, std::uint64_t seed) {
    SimScheme s;
    s.epsilon = eps;
    SimRequest r = req;
    r.seed = seed;
    return simulate_paths(spec, init, s, r);
  };
  const PathEnsemble a = run(0.05, 1101), b = run(0.01, 1102), c = run(0.1, 1103);
  LawCompareOptions opt;
  opt.bias_allowance = law_bias_allowance(c, b, 0.05, req.T, opt);
  const LawComparison cmp = one_dim_law_compare(a, b, req.T, opt);
  return {cmp.passed, Detail()("ks", cmp.distance)("null_q99", cmp.null_quantile)("bias_allowance", cmp.bias_allowance)
                          .str()};
}

Verdict criterion_12() {
  bool pass = true;
  Detail d;
  // Unit steps at distinct times s < t in [0, 1]: they differ by 1 on
  // [s, t) inside every horizon, so each summand is 2^{-k} and the leading
  // term is 1/2.
  double worst_lead = 0.0, worst_total = 0.0;
  for (auto [s, t] : {std::pair{0.2, 0.7}, {0.0, 1.0}, {0.5, 0.5001}, {0.9, 0.95}}) {
    const UniformDistance du = d_uc(unit_step(s), unit_step(t));
    worst_lead = std::max(worst_lead, std::abs(du.leading_term - 0.5));
    worst_total = std::max(worst_total, std::abs(du.value - 1.0));
  }
  const UniformDistance same = d_uc(unit_step(0.3), unit_step(0.3));
  pass = worst_lead == 0.0 && worst_total < 1e-15 && same.value == 0.0;
  d("lead_err", worst_lead)("series_err", worst_total);

  // gamma_k of a single jump at s: zero iff rho <= min(s, k - s).
  int mismatches = 0, cases = 0;
  for (double k : {1.0, 2.0, 3.0}) {
    for (double s : {0.1, 0.25, 0.5, 0.8}) {
      const CadlagPath w = unit_step(s * k);
      for (double frac : {0.05, 0.1, 0.2, 0.3, 0.45, 0.5, 0.6, 0.9}) {
        const double rho = frac * k;
        const double expected = rho <= std::min(s * k, k - s * k) ? 0.0 : 1.0;
        ++cases;
        if (gamma_k(w, k, rho) != expected) ++mismatches;
      }
    }
  }
  pass = pass && mismatches == 0;
  d("gamma_cases", cases)("gamma_mismatches", mismatches);
  return {pass, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  std::setvbuf(stdout, nullptr, _IONBF, 0);
  const std::vector<std::pair<std::function<Verdict()>, double>> criteria{
      {criterion_1, 10},   {criterion_2, 60},   {criterion_3, 30},   {criterion_4, 120},
      {criterion_5, 300},  {criterion_6, 60},   {criterion_7, 300},  {criterion_8, 120},
      {criterion_9, 600},  {criterion_10, 900}, {criterion_11, 600}, {criterion_12, 5},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = int(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].first();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double budget = criteria[i].second;
    const bool in_time = secs <= budget;
    const bool ok = v.pass && in_time;
    if (!ok) ++failures;
    std::printf("criterion %2d %s  %s time=%.1fs budget=%.0fs%s\n", id, ok ? "PASS" : "FAIL", v.detail.c_str(), secs,
                budget, in_time ? "" : " (over budget)");
  }
  return failures == 0 ? 0 : 1;
}
