#pragma once

#include <functional>
#include <vector>

#include "levyop/kernel_model.hpp"
#include "levyop/spectral_grid.hpp"
#include "levyop/symbol_calculus.hpp"

namespace levyop {

/// p(x,D) f: u(x_i) = N^{-n} sum_xi e^{i x_i xi} p(x_i, xi) fhat(xi).
/// x-independent symbols go through the FFT; dense symbols are summed
/// directly (OpenMP over output points).
GridFunction apply_xform(const SymbolField& p, const GridFunction& f);
/// q(D,x) f: inverse transform of g(xi) = sum_y e^{-i y xi} q(y, xi) f(y).
GridFunction apply_yform(const SymbolField& q, const GridFunction& f);

/// Single-threaded references for the dense sums, phases from std::polar.
namespace serial {
GridFunction apply_xform(const SymbolField& p, const GridFunction& f);
GridFunction apply_yform(const SymbolField& q, const GridFunction& f);
}  // namespace serial

struct DirectOptions {
  /// Relative tolerance for the two-resolution consistency check.
  double tol = 1e-9;
  /// tanh-sinh step 2^{-level} on the inner region.
  int inner_level = 5;
  /// Middle/tail panels are at most panel_factor * pi / xi_max long.
  double panel_factor = 1.0;
  /// Run the coarse/fine comparison and throw on disagreement.
  bool check = true;
};

/// L f by quadrature in y, one node at a time.  Each radial node r gives two
/// spectral fields (symmetric second difference and odd first difference with
/// compensator), combined pointwise with k(x, +-r).  In 2-D the angular
/// integral is done exactly against the two angular modes present in the
/// built-in kernel families.  Returns L1 f + L2 f.
/// Throws ComputationError when the two resolutions disagree beyond tol.
GridFunction apply_L_direct(const KernelSpec& spec, const GridFunction& f, const DirectOptions& opt = {});

/// Operational remainder R f = f - (lambda - P_x - L2) Q_y f, with P_x the
/// x-form of p and L2 the tail multiplier (empty table: no tail).
GridFunction remainder_operator_apply(const SymbolField& p, const SymbolField& q, cplx lambda, const GridFunction& f,
                                      const std::vector<cplx>& tail = {});

struct SchwartzOptions {
  /// A shell is negligible below rel_tol times the largest partial sum.
  double rel_tol = 1e-7;
  int max_shell = 24;
  /// Shells up to this index are evaluated at every z, settled or not.
  int record_through = 8;
};

struct SchwartzKernelTable {
  std::vector<double> z;
  /// shells[j][i] = k_j(z_i)
  std::vector<std::vector<double>> shells;
  /// Converged sum over shells.
  std::vector<double> total;
  /// Index of the last shell used per z.
  std::vector<int> last_shell;
  double order = 0.0;
  int n = 1;
};

/// Per-shell kernels k_j(z) = (2 pi)^{-1} int e^{iz xi} a(xi) phi_j(xi) dxi for
/// an even x-independent 1-D symbol a of order m (product-form coefficients
/// factor out), summed until the partial sums are Cauchy at every z.
/// Throws ParameterError for m <= -n or z = 0, ComputationError if the sum
/// does not settle within max_shell shells.
SchwartzKernelTable schwartz_kernel_sum(const std::function<double(double)>& a, double m,
                                        const std::vector<double>& z, const SchwartzOptions& opt = {});

/// Fitted log-log slope of |total| over the z-samples inside [z_lo, z_hi].
double kernel_decay_slope(const SchwartzKernelTable& t, double z_lo, double z_hi);
/// C_{j,M} = max_z |k_j(z)| |z|^M / 2^{j(n+m-M)}.
double shell_decay_constant(const SchwartzKernelTable& t, int j, double M);

}  // namespace levyop
