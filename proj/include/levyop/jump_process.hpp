#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "levyop/cauchy_solver.hpp"
#include "levyop/kernel_model.hpp"
#include "levyop/path_space.hpp"
#include "levyop/psdo_apply.hpp"
#include "levyop/spectral_grid.hpp"
#include "levyop/statistics.hpp"

namespace levyop {

/// Fast pointwise evaluation of a periodic grid function: the spectrum is
/// zero-padded to a grid `refine` times finer per axis, then a local Lagrange
/// stencil of the given degree interpolates the refined samples.
class PeriodicInterpolant {
 public:
  PeriodicInterpolant() = default;
  explicit PeriodicInterpolant(const GridFunction& f, int refine = 8, int degree = 5);
  double operator()(const Point& x) const;
  const TorusGrid& fine_grid() const { return fine_; }

 private:
  TorusGrid fine_;
  int degree_ = 5;
  std::vector<double> values_;
};

/// Truncation-plus-thinning scheme for the jump process of L.
struct SimScheme {
  /// Jumps of k1 with |y| <= epsilon are dropped.
  double epsilon = 0.02;
  /// Drift -int_{eps<|y|<=2} y k1(x,y) dy, used iff alpha >= 1.
  bool compensate = true;
  /// For alpha < 1, replace the dropped small jumps by their mean
  /// int_{|y|<=eps} y k1(x,y) dy (zero without skew).
  bool small_jump_drift = true;
  /// Euler sub-step of the drift ODE.
  double drift_step = 1e-3;
  /// Envelope scale A >= sup_x a(x) (1 + |skew|); non-positive means derive.
  double envelope_scale = -1.0;
  /// Paths with more accepted jumps are flagged and excluded.
  long max_jumps = 1'000'000;
  /// Keep every jump event (memory grows with the jump count).
  bool record_paths = false;

  /// Fills envelope_scale and sets compensate from alpha.
  SimScheme resolved(const KernelSpec& spec) const;
};

/// Point mass, a cyclic list of deterministic starting points, or a product
/// of one-dimensional marginal samplers.
struct InitialLaw {
  Point point{};
  std::vector<Point> probes;
  std::vector<std::function<double(std::mt19937_64&)>> marginals;
  std::string tag = "point";

  static InitialLaw point_mass(const Point& x);
  /// Path i starts at probes[i % probes.size()].
  static InitialLaw probe_set(std::vector<Point> probes);
  static InitialLaw product(std::vector<std::function<double(std::mt19937_64&)>> marginals, std::string tag);
  Point draw(std::size_t path, int n, std::mt19937_64& eng) const;
};

/// Integrated along every path: int_0^t g(X_s) ds at each checkpoint.
using PathIntegrand = std::function<double(const Point&)>;

/// L phi along paths for the built-in kernels, in product form
/// a(x) (L_unit phi)(x) + (L2 phi)(x): the smooth factors are interpolated
/// from the grid and the Holder coefficient is evaluated exactly.  L_unit is
/// the operator with a = 1, applied by quadrature.
PathIntegrand generator_integrand(const KernelSpec& spec, const GridFunction& phi, const DirectOptions& opt = {});

struct SimRequest {
  double T = 1.0;
  /// Times in [0, T] at which states and integrals are stored.
  std::vector<double> checkpoints{1.0};
  std::size_t n_paths = 1000;
  std::uint64_t seed = 1;
  std::vector<PathIntegrand> integrands;
};

struct PathEnsemble {
  KernelSpec spec;
  SimScheme scheme;
  std::string initial_tag;
  double T = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> checkpoints;
  std::size_t requested = 0;
  std::size_t excluded = 0;
  std::size_t integrand_count = 0;
  /// Seed-ladder index of every delivered path.
  std::vector<std::size_t> path_index;
  std::vector<Point> initial;
  /// states[p * C + c] = X at checkpoint c of delivered path p.
  std::vector<Point> states;
  /// integrals[(i * P + p) * C + c].
  std::vector<double> integrals;
  std::vector<long> jumps;
  long proposals_k1 = 0, accepted_k1 = 0;
  long proposals_k2 = 0, accepted_k2 = 0;
  /// Envelope intensities of the two proposal streams.
  double rate_k1 = 0.0, rate_k2 = 0.0;
  /// Filled only with record_paths.
  std::vector<CadlagPath> paths;

  std::size_t size() const { return path_index.size(); }
  std::size_t checkpoint_index(double t) const;
  const Point& state(std::size_t p, std::size_t c) const { return states[p * checkpoints.size() + c]; }
  double integral(std::size_t i, std::size_t p, std::size_t c) const {
    return integrals[(i * size() + p) * checkpoints.size() + c];
  }
};

/// Thinning simulation of the truncated process.  Throws ComputationError
/// naming (x, y) if the envelope fails to dominate the kernel, and
/// ParameterError on an invalid request.
PathEnsemble simulate_paths(const KernelSpec& spec, const InitialLaw& init, const SimScheme& scheme,
                            const SimRequest& req);

/// Same paths, generated without OpenMP.
PathEnsemble simulate_paths_serial(const KernelSpec& spec, const InitialLaw& init, const SimScheme& scheme,
                                   const SimRequest& req);

/// Drift coefficient of the scheme at x.
Point scheme_drift(const KernelSpec& spec, const SimScheme& scheme, const Point& x);

/// Intensity of k1 restricted to |y| > epsilon, integral over y of k1(x, y)
/// for constant coefficient (quadrature, independent of the envelope).
double truncated_intensity(const KernelSpec& spec, double epsilon);

/// path index, jump count, initial state, terminal state.
void write_summary_csv(std::ostream& os, const PathEnsemble& ens);
/// One line per jump event: path, time, left limit, value.
void write_jump_events(std::ostream& os, const PathEnsemble& ens);

struct MartingaleOptions {
  /// Multiplies the integrated generator term (1 is the true generator).
  double scale = 1.0;
  double threshold = 3.0;
  /// If positive and the final-checkpoint SE exceeds it, AdvisoryError.
  double target_se = 0.0;
};

struct MartingaleStat {
  std::string label;
  double s = 0.0;
  double t = 0.0;
  MeanEstimate estimate;
  bool passed = false;
};

/// M_t = phi(X_t) - phi(X_0) - scale * int_0^t L phi(X_s) ds.
struct MartingaleReport {
  std::vector<double> checkpoints;
  std::vector<MeanEstimate> mean_M;
  /// E[(M_t - M_s) g(X_s)] for consecutive checkpoint pairs and
  /// g in {1{X_s,0 > X_0,0}, X_s,0 - X_0,0}.
  std::vector<MartingaleStat> orthogonality;
  double threshold = 3.0;
  double scale = 1.0;
  double max_z = 0.0;
  bool passed = false;
  /// |E M_T(this scheme) - E M_T(reference scheme)|, when measured.
  double scheme_bias = -1.0;
};

/// `generator_integrand` is the index of the integrand holding L phi.
MartingaleReport martingale_residual(const PathEnsemble& ens, const std::function<double(const Point&)>& phi,
                                     std::size_t generator_integrand, const MartingaleOptions& opt = {});

/// Fills a.scheme_bias from two reports of the same phi under two schemes.
void record_scheme_bias(MartingaleReport& a, const MartingaleReport& b);

void write_csv(std::ostream& os, const MartingaleReport& r);

struct LawComparison {
  /// KS distance (n = 1) or max |characteristic function difference| (n = 2).
  double distance = 0.0;
  double null_quantile = 0.0;
  double quantile_level = 0.99;
  double bias_allowance = 0.0;
  bool passed = false;
};

struct LawCompareOptions {
  double quantile_level = 0.99;
  int replicates = 200;
  std::uint64_t seed = 7;
  double bias_allowance = 0.0;
};

/// Compares the laws of X_t under two ensembles.  Throws ParameterError if
/// the kernels, initial laws or horizons differ or t is not a checkpoint.
LawComparison one_dim_law_compare(const PathEnsemble& a, const PathEnsemble& b, double t,
                                  const LawCompareOptions& opt = {});

/// Scheme-bias allowance for comparing schemes eps_a > eps_b: the excess of
/// the (eps_c, eps_b) distance over its null median, scaled by
/// (eps_a^{2-alpha} - eps_b^{2-alpha}) / (eps_c^{2-alpha} - eps_b^{2-alpha}).
double law_bias_allowance(const PathEnsemble& coarse, const PathEnsemble& fine, double eps_a, double t,
                          const LawCompareOptions& opt = {});

struct ProbeError {
  Point x{};
  MeanEstimate mc;
  double pde = 0.0;
  double error = 0.0;
  double tolerance = 0.0;
};

struct McPdeTable {
  double t = 0.0;
  std::vector<ProbeError> rows;
  double max_error = 0.0;
  double max_se = 0.0;
  double bias_allowance = 0.0;
  bool passed = false;
};

/// E^x[psi(X_t)] per distinct starting point against u(t, x) from a
/// homogeneous Cauchy trajectory with u(0) = psi.  The tolerance per probe is
/// 3 SE + bias_allowance.
McPdeTable mc_vs_pde(const PathEnsemble& ens, const GridFunction& psi, double t, const Trajectory& pde,
                     double bias_allowance);

void write_csv(std::ostream& os, const McPdeTable& t);

}  // namespace levyop
