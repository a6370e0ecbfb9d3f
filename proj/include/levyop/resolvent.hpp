#pragma once

#include <memory>
#include <ostream>
#include <vector>

#include "levyop/kernel_model.hpp"
#include "levyop/psdo_apply.hpp"
#include "levyop/spectral_grid.hpp"
#include "levyop/symbol_calculus.hpp"

namespace levyop {

/// L discretized on a torus grid: principal symbol (x-form), tail multiplier
/// and the sector certificate of the principal symbol.
struct DiscreteGenerator {
  KernelSpec spec;
  TorusGrid grid;
  SymbolField p;
  std::vector<cplx> tail;
  SectorReport sector;

  static DiscreteGenerator build(const KernelSpec& spec, const TorusGrid& grid, const SymbolOptions& opt = {});
  /// P_x f + L2 f.
  GridFunction apply(const GridFunction& f) const;
};

struct NeumannOptions {
  /// Stop once ||R^K f||_inf <= tol ||f||_inf.
  double tol = 1e-12;
  int max_iterations = 64;
};

struct ResolventSolve {
  GridFunction u;
  int iterations = 0;
  /// ||R^k f||_inf / ||f||_inf for k = 0..K.
  std::vector<double> residuals;
  bool converged = false;
};

/// (lambda - L)^{-1} through the parametrix q_lambda(D,x) and the Neumann
/// series in R_lambda.  Immutable after construction.
class ResolventOperator {
 public:
  /// Throws PreconditionError for an inadmissible lambda.
  ResolventOperator(std::shared_ptr<const DiscreteGenerator> gen, cplx lambda, NeumannOptions opt = {});

  cplx lambda() const { return lambda_; }
  const SymbolField& parametrix() const { return q_; }
  const DiscreteGenerator& generator() const { return *gen_; }

  /// Throws DivergenceError when the residual ratio stays >= 1 for three
  /// consecutive iterations or the depth cap is hit.
  ResolventSolve solve(const GridFunction& f) const;
  GridFunction operator()(const GridFunction& f) const { return solve(f).u; }
  /// R_lambda f.
  GridFunction remainder(const GridFunction& f) const;

 private:
  std::shared_ptr<const DiscreteGenerator> gen_;
  cplx lambda_;
  NeumannOptions opt_;
  SymbolField q_;
};

/// ||(lambda - L) u - f||_inf / ||f||_inf with L applied by direct quadrature.
double resolvent_defect(const KernelSpec& spec, cplx lambda, const GridFunction& u, const GridFunction& f,
                        const DirectOptions& opt = {});

/// Twelve probes normalized to unit C^s norm: three Gaussians, a wide von
/// Mises bump, two off-centre Gaussians, two modulated bumps and four wave
/// packets at 3/4 of the Nyquist frequency divided by 1, 2, 4, 8.
std::vector<GridFunction> probe_basket(const TorusGrid& grid, double s = 0.25);

struct GeneratorReport {
  std::vector<cplx> lambdas;
  std::vector<double> alpha_primes;
  /// norms[a][l]: max over probes of ||u||_{C^{s+alpha'_a}} / ||f||_{C^s}.
  std::vector<std::vector<double>> norms;
  /// max over probes of ||u||_inf / ||f||_inf per lambda.
  std::vector<double> sup_norms;
  std::vector<double> slopes;
  std::vector<double> expected_slopes;
  double s = 0.25;
  double sector_angle = 0.0;
  /// Constants of ||(lambda - A)^{-1}|| <= M / |lambda - omega| in L^inf.
  double omega = 0.0;
  double M_gen = 0.0;
};

GeneratorReport generator_bound_scan(const std::shared_ptr<const DiscreteGenerator>& gen,
                                     const std::vector<cplx>& lambdas, const std::vector<GridFunction>& probes,
                                     const std::vector<double>& alpha_primes, double s = 0.25,
                                     const NeumannOptions& opt = {});
void write_csv(std::ostream& os, const GeneratorReport& r);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct PositivityResult {
  bool nonnegative = true;
  double min_value = 0.0;
};

/// Solves (lambda - L) u = f for real admissible lambda and f >= 0 and checks
/// min u >= -tol_pos ||f||_inf.  Throws PreconditionError when f has a
/// negative sample or lambda is not real.
PositivityResult positivity_of_resolvent(const std::shared_ptr<const DiscreteGenerator>& gen, double lambda,
                                         const GridFunction& f, double tol_pos = 1e-10);

}  // namespace levyop
