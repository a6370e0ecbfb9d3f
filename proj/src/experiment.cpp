#include "levyop/experiment.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <memory>
#include <sstream>

#include "levyop/cauchy_solver.hpp"
#include "levyop/jump_process.hpp"
#include "levyop/psdo_apply.hpp"
#include "levyop/resolvent.hpp"

namespace levyop {

namespace {

constexpr const char* kVersion = "0.1.0";

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

class Pipeline {
 public:
  Pipeline(const ExperimentConfig& cfg, std::ostream* log) : cfg_(cfg), log_(log), grid_() {}

  ExperimentResult run() {
    cfg_.validate();
    out_.dir = cfg_.out_dir;
    out_.stages = cfg_.stages();
    std::filesystem::create_directories(out_.dir);
    const auto start = std::chrono::steady_clock::now();
    for (const auto& stage : out_.stages) {
      note("stage " + stage);
      const auto t0 = std::chrono::steady_clock::now();
      try {
        dispatch(stage);
      } catch (const StageError&) {
        throw;
      } catch (const std::exception& e) {
        throw StageError(stage, e.what());
      }
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      manifest_.set("wallclock." + stage, num(secs));
    }
    evaluate_checks();
    if (cfg_.plots) write_plot_script();
    const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(total);
    return out_;
  }

 private:
  void note(const std::string& line) {
    if (log_) *log_ << line << std::endl;
  }

  void metric(const std::string& name, double v) { out_.metrics[name] = v; }

  std::ofstream open(const std::string& name) {
    std::ofstream os(out_.dir / name);
    if (!os) throw Error("cannot write " + (out_.dir / name).string());
    out_.files.push_back(name);
    return os;
  }

  const TorusGrid& grid() {
    if (!grid_ready_) {
      grid_ = cfg_.grid();
      grid_ready_ = true;
    }
    return grid_;
  }

  std::shared_ptr<const DiscreteGenerator> generator() {
    if (!gen_) {
      const KernelSpec spec = cfg_.kernel.with_derived_constants();
      gen_ = std::make_shared<const DiscreteGenerator>(DiscreteGenerator::build(spec, grid(), cfg_.symbol));
    }
    return gen_;
  }

  GridFunction gaussian(double center, double width) {
    const int n = cfg_.kernel.n;
    return GridFunction::sample_real(grid(), [=](const Point& x) {
      Point d = x;
      d[0] -= center;
      const double r = norm(d, n);
      return std::exp(-0.5 * r * r / (width * width));
    });
  }

  void dispatch(const std::string& stage) {
    if (stage == "validate") return stage_validate();
    if (stage == "symbol") return stage_symbol();
    if (stage == "resolvent") return stage_resolvent();
    if (stage == "cauchy") return stage_cauchy();
    if (stage == "simulate") return stage_simulate();
    if (stage == "verify-martingale") return stage_martingale();
    if (stage == "mcpde") return stage_mcpde();
    if (stage == "bench") return stage_bench();
    throw ConfigError("unknown stage '" + stage + "'");
  }

  void stage_validate() {
    const int n = cfg_.kernel.n;
    const auto xs = default_x_samples(n, n == 1 ? 64 : 16);
    const auto ys = default_y_samples(n, n == 1 ? 64 : 24);
    const KernelSpec spec = cfg_.kernel.with_derived_constants();
    const ValidationReport rep = validate_assumptions(spec, xs, ys);
    auto os = open("validate.csv");
    os << "check,passed,measured,bound,margin,reduced_confidence,worst_point\n" << std::setprecision(12);
    for (const auto& c : rep.checks)
      os << c.name << ',' << c.passed << ',' << c.measured << ',' << c.bound << ',' << c.margin << ','
         << c.reduced_confidence << ",\"" << c.worst_point << "\"\n";
    metric("validate.all_passed", rep.all_passed() ? 1.0 : 0.0);
    metric("validate.singularity_exponent", rep.singularity_exponent);
    metric("validate.holder_quotient", rep.holder_quotient);
  }

  void stage_symbol() {
    const auto gen = generator();
    {
      auto os = open("symbol.csv");
      write_csv(os, gen->p);
    }
    {
      auto os = open("sector.txt");
      os << to_text(gen->sector);
    }
    metric("symbol.R", gen->sector.R);
    metric("symbol.delta_prime", gen->sector.delta_prime);
    metric("symbol.class_norm", symbol_class_norm(gen->p, cfg_.kernel.alpha));
  }

  void stage_resolvent() {
    const auto gen = generator();
    const double R = gen->sector.R;
    const auto& rs = cfg_.resolvent;
    const auto probes = probe_basket(grid(), rs.s);
    const ResolventOperator res(gen, rs.solve_multiple * R, rs.neumann);
    int worst_iter = 0;
    double worst_defect = 0.0;
    const GridFunction& f = probes.front();
    const ResolventSolve sol = res.solve(f);
    worst_iter = sol.iterations;
    worst_defect = resolvent_defect(gen->spec, rs.solve_multiple * R, sol.u, f, DirectOptions{});
    metric("resolvent.iterations", worst_iter);
    metric("resolvent.defect", worst_defect);

    std::vector<cplx> lambdas;
    for (double m : rs.lambda_multiples) lambdas.emplace_back(m * R, 0.0);
    std::vector<double> aps = rs.alpha_primes;
    if (aps.empty()) aps = {0.0, cfg_.kernel.alpha};
    const GeneratorReport rep = generator_bound_scan(gen, lambdas, probes, aps, rs.s, rs.neumann);
    auto os = open("resolvent_scan.csv");
    write_csv(os, rep);
    for (std::size_t a = 0; a < aps.size(); ++a) metric("resolvent.slope_" + num(aps[a]), rep.slopes[a]);
    metric("resolvent.M_gen", rep.M_gen);
  }

  std::function<GridFunction(double)> forcing(double T) {
    const std::string kind = cfg_.cauchy.forcing;
    const double l = cfg_.half_period;
    if (kind == "none") return {};
    GridFunction shape;
    std::function<double(double)> profile = [T](double t) { return t / T; };
    if (kind == "bump") {
      shape = gaussian(0.0, 0.3 * l);
    } else if (kind == "mode") {
      shape = GridFunction::sample_real(grid(), [l](const Point& x) { return std::cos(x[0] / l); });
      profile = [](double t) { return std::sin(t); };
    } else {
      // single mode in the second-to-last dyadic shell
      const DyadicPartition part(grid());
      const double xi = std::ldexp(1.0, part.max_shell() - 1);
      const double k = std::min(std::round(xi * l), grid().points() / 2.0 - 1.0);
      shape = GridFunction::sample_real(grid(), [k, l](const Point& x) { return std::cos(k * x[0] / l); });
    }
    return [shape, profile](double t) { return cplx(profile(t), 0.0) * shape; };
  }

  GridFunction initial_data() {
    const std::string kind = cfg_.cauchy.initial;
    const double l = cfg_.half_period;
    if (kind == "zero") return GridFunction(grid(), Space::physical);
    if (kind == "bump") return gaussian(0.0, 0.3 * l);
    return GridFunction::sample_real(grid(), [l](const Point& x) { return std::cos(x[0] / l); });
  }

  void stage_cauchy() {
    const auto& cs = cfg_.cauchy;
    CauchyProblem prob;
    prob.generator = generator();
    prob.forcing = forcing(cs.T);
    prob.initial = initial_data();
    prob.T = cs.T;
    prob.steps = cs.steps;
    prob.s = cs.s;
    prob.theta = cs.theta;
    prob.require_f0_zero = cs.require_f0_zero;
    prob.neumann = cfg_.resolvent.neumann;
    const Trajectory tr = solve_cauchy(prob);
    const RegularityReport reg = regularity_report(tr, cs.s, cfg_.kernel.alpha, cs.theta);
    for (const auto& f : export_trajectory(tr, out_.dir / "cauchy", "u")) out_.files.push_back("cauchy/" + f);
    auto os = open("cauchy_regularity.csv");
    os << "t,norm_s,norm_s_alpha,min_u\n" << std::setprecision(12);
    double min_u = 0.0, max_defect = 0.0;
    for (std::size_t m = 0; m < tr.states.size(); ++m) {
      os << reg.times[m] << ',' << reg.norm_s[m] << ',' << reg.norm_s_alpha[m] << ',' << tr.states[m].min_real()
         << '\n';
      min_u = std::min(min_u, tr.states[m].min_real());
      max_defect = std::max(max_defect, tr.defects[m]);
    }
    metric("cauchy.max_defect", max_defect);
    metric("cauchy.max_norm_s_alpha", reg.max_norm_s_alpha);
    metric("cauchy.theta_quotient", reg.theta_quotient);
    metric("cauchy.min_u_over_f", tr.max_forcing > 0.0 ? min_u / tr.max_forcing : min_u);
  }

  SimScheme scheme() const {
    SimScheme s;
    s.epsilon = cfg_.simulation.epsilon;
    s.drift_step = cfg_.simulation.drift_step;
    s.max_jumps = cfg_.simulation.max_jumps;
    s.record_paths = cfg_.simulation.record_paths;
    return s;
  }

  SimRequest request() const {
    SimRequest req;
    req.T = cfg_.simulation.T;
    req.checkpoints.clear();
    for (double f : cfg_.simulation.checkpoints) req.checkpoints.push_back(f * req.T);
    req.n_paths = cfg_.simulation.paths;
    req.seed = cfg_.seed;
    return req;
  }

  InitialLaw probes() const {
    std::vector<Point> pts;
    for (double p : cfg_.simulation.probes) pts.push_back({p, 0.0});
    return pts.size() == 1 ? InitialLaw::point_mass(pts[0]) : InitialLaw::probe_set(pts);
  }

  void stage_simulate() {
    const PathEnsemble ens = simulate_paths(cfg_.kernel, probes(), scheme(), request());
    {
      auto os = open("paths_summary.csv");
      write_summary_csv(os, ens);
    }
    if (cfg_.simulation.record_paths) {
      auto os = open("jump_events.txt");
      write_jump_events(os, ens);
    }
    double jumps = 0.0;
    for (long j : ens.jumps) jumps += static_cast<double>(j);
    metric("simulate.delivered", static_cast<double>(ens.size()));
    metric("simulate.excluded", static_cast<double>(ens.excluded));
    metric("simulate.mean_jumps", ens.size() ? jumps / static_cast<double>(ens.size()) : 0.0);
    metric("simulate.acceptance", ens.proposals_k1 ? static_cast<double>(ens.accepted_k1) / ens.proposals_k1 : 0.0);
    manifest_.set("seed.root", std::to_string(cfg_.seed));
    manifest_.set("seed.ladder", "splitmix64(root + 0x9e3779b97f4a7c15 * (path + 1)) -> mt19937_64");
  }

  void stage_martingale() {
    const double center = cfg_.simulation.probes.front();
    const GridFunction phi = gaussian(center, cfg_.simulation.sigma * cfg_.half_period);
    const PeriodicInterpolant phi_at(phi);
    SimRequest req = request();
    req.integrands = {generator_integrand(cfg_.kernel, phi)};
    const InitialLaw init = InitialLaw::point_mass({center, 0.0});
    const PathEnsemble ens = simulate_paths(cfg_.kernel, init, scheme(), req);
    auto phi_fn = [&phi_at](const Point& x) { return phi_at(x); };
    MartingaleReport rep = martingale_residual(ens, phi_fn, 0);
    SimScheme coarse = scheme();
    coarse.epsilon = std::min(0.5, 2.0 * coarse.epsilon);
    const PathEnsemble ens_coarse = simulate_paths(cfg_.kernel, init, coarse, req);
    record_scheme_bias(rep, martingale_residual(ens_coarse, phi_fn, 0));
    MartingaleOptions perturbed;
    perturbed.scale = 1.2;
    const MartingaleReport power = martingale_residual(ens, phi_fn, 0, perturbed);
    {
      auto os = open("martingale.csv");
      write_csv(os, rep);
    }
    {
      auto os = open("martingale_perturbed.csv");
      write_csv(os, power);
    }
    metric("martingale.max_z", rep.max_z);
    metric("martingale.perturbed_z", power.max_z);
    metric("martingale.scheme_bias", rep.scheme_bias);
    metric("martingale.final_se", rep.mean_M.back().se);
  }

  void stage_mcpde() {
    const auto& ss = cfg_.simulation;
    const GridFunction psi = gaussian(0.0, ss.sigma * cfg_.half_period);
    const double dt = cfg_.cauchy.T / cfg_.cauchy.steps;
    const int steps = static_cast<int>(std::lround(ss.T / dt));
    const Trajectory pde = solve_homogeneous(generator(), psi, ss.T, steps);
    SimRequest req = request();
    req.checkpoints = {ss.T};
    std::vector<Point> pts;
    for (double p : ss.probes) pts.push_back({p, 0.0});
    const PathEnsemble ens = simulate_paths(cfg_.kernel, InitialLaw::probe_set(pts), scheme(), req);
    const McPdeTable table = mc_vs_pde(ens, psi, ss.T, pde, 0.0);
    auto os = open("mc_vs_pde.csv");
    write_csv(os, table);
    metric("mcpde.max_error", table.max_error);
    metric("mcpde.max_se", table.max_se);
  }

  void stage_bench() {
    const auto gen = generator();
    const GridFunction f = gaussian(0.0, 0.3 * cfg_.half_period);
    auto time = [&](auto&& fn) {
      const auto t0 = std::chrono::steady_clock::now();
      const GridFunction u = fn();
      return std::make_pair(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), u);
    };
    const auto [t_par, u_par] = time([&] { return apply_xform(gen->p, f); });
    const auto [t_ser, u_ser] = time([&] { return serial::apply_xform(gen->p, f); });
    metric("bench.max_difference", (u_par - u_ser).max_abs());
    // timings are not reproducible, so they live only in the manifest
    manifest_.set("wallclock.bench.xform_parallel", num(t_par));
    manifest_.set("wallclock.bench.xform_serial", num(t_ser));
  }

  void evaluate_checks() {
    out_.status = 0;
    for (const auto& c : cfg_.checks) {
      CheckOutcome o;
      o.check = c;
      const auto it = out_.metrics.find(c.metric);
      o.found = it != out_.metrics.end();
      if (o.found) {
        o.value = it->second;
        o.passed = c.upper ? o.value <= c.bound : o.value >= c.bound;
      }
      if (!o.passed) out_.status = 1;
      out_.checks.push_back(o);
    }
    if (!out_.metrics.empty()) {
      auto os = open("metrics.csv");
      os << "metric,value\n" << std::setprecision(12);
      for (const auto& [k, v] : out_.metrics) os << k << ',' << v << '\n';
    }
    if (!out_.checks.empty()) {
      auto cs = open("checks.csv");
      cs << "metric,kind,bound,value,found,passed\n" << std::setprecision(12);
      for (const auto& o : out_.checks)
        cs << o.check.metric << ',' << (o.check.upper ? "max" : "min") << ',' << o.check.bound << ',' << o.value
           << ',' << o.found << ',' << o.passed << '\n';
    }
  }

  void write_plot_script() {
    std::ostringstream gp;
    gp << "set datafile separator ','\nset terminal pngcairo size 900,600\n";
    bool any = false;
    for (const auto& f : out_.files) {
      if (f == "resolvent_scan.csv") {
        gp << "set output 'resolvent_scan.png'\nset logscale xy\nplot '" << f
           << "' skip 1 using 3:5 with linespoints title 'norm vs |lambda|'\nunset logscale\n";
        any = true;
      } else if (f == "cauchy_regularity.csv") {
        gp << "set output 'cauchy_regularity.png'\nplot '" << f
           << "' skip 1 using 1:3 with lines title 'C^{s+alpha} norm'\n";
        any = true;
      } else if (f == "mc_vs_pde.csv") {
        gp << "set output 'mc_vs_pde.png'\nplot '" << f << "' skip 1 using 1:4:5 with yerrorbars title 'MC', '' skip 1 using 1:6 title 'PDE'\n";
        any = true;
      }
    }
    if (!any) return;
    auto os = open("plots.gp");
    os << gp.str();
  }

  void write_manifest(double total) {
    manifest_.set("config_hash", hex64(fnv1a64(cfg_.source_text)));
    manifest_.set("kind", cfg_.kind);
    std::string stages;
    for (const auto& s : out_.stages) stages += (stages.empty() ? "" : ",") + s;
    manifest_.set("stages", stages);
    manifest_.set("seed.root", std::to_string(cfg_.seed));
    manifest_.set("version.levyop", kVersion);
    manifest_.set("status", std::to_string(out_.status));
    manifest_.set("wallclock.total", num(total));
    const std::time_t now = std::time(nullptr);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    manifest_.set("timestamp", stamp);
    for (const auto& f : out_.files) manifest_.add_file(f);
    manifest_.write(out_.dir / "manifest.txt");
  }

  const ExperimentConfig& cfg_;
  std::ostream* log_;
  TorusGrid grid_;
  bool grid_ready_ = false;
  std::shared_ptr<const DiscreteGenerator> gen_;
  Manifest manifest_;
  ExperimentResult out_;
};

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream* log) {
  Pipeline p(cfg, log);
  return p.run();
}

}  // namespace levyop
