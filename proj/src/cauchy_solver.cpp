#include "levyop/cauchy_solver.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "levyop/errors.hpp"

namespace levyop {

namespace {

void require_steps(double T, int steps) {
  if (!(T > 0.0) || steps < 1) throw ParameterError("time horizon and step count must be positive");
}

}  // namespace

Trajectory solve_cauchy(const CauchyProblem& prob) {
  if (!prob.generator) throw ParameterError("solve_cauchy: no generator");
  require_steps(prob.T, prob.steps);
  const auto& gen = *prob.generator;
  const double dt = prob.T / prob.steps;
  const double lambda = 1.0 / dt;
  if (!gen.sector.admissible(lambda)) {
    std::ostringstream os;
    os << "solve_cauchy: lambda = 1/dt = " << lambda << " is below the admissibility radius " << gen.sector.R
       << "; a smaller dt raises lambda, so this signals a kernel or sector problem only if dt is already small";
    throw PreconditionError(os.str());
  }
  auto forcing = [&](double t) {
    return prob.forcing ? prob.forcing(t) : GridFunction(gen.grid, Space::physical);
  };
  if (prob.require_f0_zero && forcing(0.0).max_abs() > 0.0)
    throw PreconditionError("solve_cauchy: require_f0_zero needs f(0, .) = 0");

  const ResolventOperator res(prob.generator, lambda, prob.neumann);
  Trajectory tr;
  tr.dt = dt;
  tr.times.push_back(0.0);
  tr.states.push_back(prob.initial.size() ? prob.initial : GridFunction(gen.grid, Space::physical));
  tr.defects.push_back(0.0);
  tr.iterations.push_back(0);
  for (int m = 0; m < prob.steps; ++m) {
    const double t = (m + 1) * dt;
    const GridFunction f = forcing(t);
    tr.max_forcing = std::max(tr.max_forcing, f.max_abs());
    const GridFunction& prev = tr.states.back();
    GridFunction rhs = lambda * prev;
    rhs += f;
    const ResolventSolve sol = res.solve(rhs);
    // (u - prev)/dt - L u - f
    GridFunction d = lambda * (sol.u - prev);
    d -= gen.apply(sol.u);
    d -= f;
    const double scale = std::max(f.max_abs(), lambda * prev.max_abs());
    const double defect = scale > 0.0 ? d.max_abs() / scale : d.max_abs();
    if (defect > prob.defect_tol) {
      std::ostringstream os;
      os << "solve_cauchy: step " << m + 1 << " defect " << defect << " exceeds " << prob.defect_tol;
      throw ComputationError(os.str());
    }
    tr.times.push_back(t);
    tr.states.push_back(sol.u);
    tr.defects.push_back(defect);
    tr.iterations.push_back(sol.iterations);
  }
  return tr;
}

Trajectory solve_homogeneous(const std::shared_ptr<const DiscreteGenerator>& gen, const GridFunction& psi, double T,
                             int steps) {
  CauchyProblem prob;
  prob.generator = gen;
  prob.initial = psi;
  prob.T = T;
  prob.steps = steps;
  return solve_cauchy(prob);
}

Trajectory solve_backward(const std::shared_ptr<const DiscreteGenerator>& gen, const std::function<double(double)>& phi,
                          const GridFunction& psi, double T, int steps) {
  CauchyProblem prob;
  prob.generator = gen;
  prob.T = T;
  prob.steps = steps;
  prob.forcing = [&](double tau) { return -phi(T - tau) * psi; };
  const Trajectory w = solve_cauchy(prob);
  Trajectory v;
  v.dt = w.dt;
  v.max_forcing = w.max_forcing;
  const std::size_t M = w.times.size();
  for (std::size_t m = 0; m < M; ++m) {
    const std::size_t r = M - 1 - m;
    v.times.push_back(T - w.times[r]);
    v.states.push_back(w.states[r]);
    v.defects.push_back(w.defects[r]);
    v.iterations.push_back(w.iterations[r]);
  }
  return v;
}

RegularityReport regularity_report(const Trajectory& traj, double s, double alpha, double theta) {
  RegularityReport rep;
  rep.theta = theta;
  rep.times = traj.times;
  if (traj.states.empty()) return rep;
  const DyadicPartition part(traj.states.front().grid());
  for (const auto& u : traj.states) {
    rep.norm_s.push_back(holder_zygmund_norm(u, s, part));
    rep.norm_s_alpha.push_back(holder_zygmund_norm(u, s + alpha, part));
    rep.max_norm_s_alpha = std::max(rep.max_norm_s_alpha, rep.norm_s_alpha.back());
  }
  const std::size_t M = traj.states.size();
  for (std::size_t lag = 1; lag < M; lag *= 2) {
    for (std::size_t m = 0; m + lag < M; m += lag) {
      const double dq = holder_zygmund_norm(traj.states[m + lag] - traj.states[m], s, part);
      const double dt = traj.times[m + lag] - traj.times[m];
      rep.theta_quotient = std::max(rep.theta_quotient, dq / std::pow(std::abs(dt), theta));
    }
  }
  return rep;
}

std::vector<std::string> export_trajectory(const Trajectory& traj, const std::filesystem::path& dir,
                                           const std::string& prefix) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> files;
  for (std::size_t m = 0; m < traj.states.size(); ++m) {
    std::ostringstream name;
    name << prefix << "_t" << std::setw(5) << std::setfill('0') << m << ".csv";
    std::ofstream os(dir / name.str());
    if (!os) throw Error("cannot write " + (dir / name.str()).string());
    write_csv(os, traj.states[m]);
    files.push_back(name.str());
  }
  const std::string manifest = prefix + "_manifest.txt";
  std::ofstream os(dir / manifest);
  if (!os) throw Error("cannot write " + (dir / manifest).string());
  os << std::setprecision(12);
  os << "dt = " << traj.dt << "\n";
  os << "slices = " << traj.states.size() << "\n";
  os << "max_forcing = " << traj.max_forcing << "\n";
  double worst = 0.0;
  for (double d : traj.defects) worst = std::max(worst, d);
  os << "max_defect = " << worst << "\n";
  for (std::size_t m = 0; m < traj.states.size(); ++m)
    os << "slice." << m << " = " << files[m] << " t=" << traj.times[m] << " defect=" << traj.defects[m]
       << " sup=" << traj.states[m].max_abs() << "\n";
  files.push_back(manifest);
  return files;
}

}  // namespace levyop
