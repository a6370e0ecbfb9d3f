#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "levyop/resolvent.hpp"

namespace levyop {

/// du/dt - L u = f(t, .) on [0, T] with u(0) = u0 (zero by default), solved
/// by backward Euler: u^{m+1} = (lambda - L)^{-1} (lambda u^m + f(t_{m+1})),
/// lambda = 1/dt.
struct CauchyProblem {
  std::shared_ptr<const DiscreteGenerator> generator;
  /// Forcing sampled at the right endpoint of every step; empty means f = 0.
  std::function<GridFunction(double)> forcing;
  /// Empty (default-constructed) means zero initial data.
  GridFunction initial;
  double T = 1.0;
  int steps = 64;
  double s = 0.25;
  double theta = 0.5;
  /// Enforce f(0, .) = 0 before stepping.
  bool require_f0_zero = false;
  /// Relative per-step defect tolerance.
  double defect_tol = 1e-8;
  NeumannOptions neumann{};
};

struct Trajectory {
  std::vector<double> times;
  std::vector<GridFunction> states;
  /// ||(u^{m+1} - u^m)/dt - L u^{m+1} - f^{m+1}||_inf / max(||f||, ||u||/dt).
  std::vector<double> defects;
  /// Neumann depth used at every step.
  std::vector<int> iterations;
  double max_forcing = 0.0;
  double dt = 0.0;
};

/// Throws PreconditionError when 1/dt is not admissible or require_f0_zero is
/// set and f(0) != 0; ComputationError when a step defect
/// exceeds its tolerance.
Trajectory solve_cauchy(const CauchyProblem& prob);

/// du/dt = L u, u(0) = psi.
Trajectory solve_homogeneous(const std::shared_ptr<const DiscreteGenerator>& gen, const GridFunction& psi, double T,
                             int steps);

/// Terminal-value problem dv/dt + L v = phi(t) psi, v(T) = 0, solved through
/// w(tau) = v(T - tau).  The returned trajectory is indexed by forward time:
/// states[m] = v(times[m]).
Trajectory solve_backward(const std::shared_ptr<const DiscreteGenerator>& gen, const std::function<double(double)>& phi,
                          const GridFunction& psi, double T, int steps);

struct RegularityReport {
  std::vector<double> times;
  std::vector<double> norm_s;
  std::vector<double> norm_s_alpha;
  double max_norm_s_alpha = 0.0;
  /// max over dyadic step lags of ||u(t) - u(t')||_{C^s} / |t - t'|^theta.
  double theta_quotient = 0.0;
  double theta = 0.5;
};

RegularityReport regularity_report(const Trajectory& traj, double s, double alpha, double theta = 0.5);

/// One CSV per time slice plus a key = value manifest; returns the written
/// file names relative to dir.
std::vector<std::string> export_trajectory(const Trajectory& traj, const std::filesystem::path& dir,
                                           const std::string& prefix);

}  // namespace levyop
