#pragma once

#include <functional>
#include <string>
#include <vector>

#include "levyop/kernel_model.hpp"
#include "levyop/spectral_grid.hpp"

namespace levyop {

/// Samples p(x_i, xi_k) on a torus grid.  A field is either x-independent
/// (one row, applied as a Fourier multiplier) or dense (one row per grid
/// point).  Frequencies follow the storage order of the grid.
struct SymbolField {
  TorusGrid grid;
  std::size_t rows = 1;
  std::vector<cplx> values;
  double order = 0.0;
  double tau = 0.5;
  int derivative_budget = 2;

  bool x_independent() const { return rows == 1; }
  cplx at(std::size_t x_idx, std::size_t k) const {
    return values[(rows == 1 ? 0 : x_idx) * grid.size() + k];
  }
  const cplx* row(std::size_t x_idx) const { return values.data() + (rows == 1 ? 0 : x_idx) * grid.size(); }

  static SymbolField constant(const TorusGrid& grid, cplx value, double order = 0.0);
  /// Samples s(x, xi); with x_dependent = false only x = grid point 0 is used.
  static SymbolField from_function(const TorusGrid& grid, bool x_dependent,
                                   const std::function<cplx(const Point&, const Point&)>& s, double order);

  /// q(x, xi) = p(x, -xi).
  SymbolField reflected() const;
  SymbolField conjugated() const;
  /// p + c (pointwise).
  SymbolField shifted(cplx c) const;
  /// Max over x of the spread of p(., xi), over all xi.
  double x_spread() const;
};

struct SymbolOptions {
  /// Relative tolerance of the radial quadratures.
  double rel_tol = 1e-11;
};

/// Radial factors of the principal symbol.  For every built-in family
///   p(x, xi) = a(x) [ even(|xi|) + i skew (xi_1/|xi|) odd(|xi|) ].
struct RadialFactors {
  double even = 0.0;
  double odd = 0.0;
};

RadialFactors principal_radial_factors(const KernelSpec& spec, double xi_norm, const SymbolOptions& opt = {});
/// p(x, xi) for a single point.
cplx principal_symbol(const KernelSpec& spec, const Point& x, const Point& xi, const SymbolOptions& opt = {});
/// Symbol of the lower-order part, int (e^{iy.xi} - 1) k2(y) dy (k2 is radial).
double tail_symbol(const KernelSpec& spec, double xi_norm, const SymbolOptions& opt = {});

/// p on the grid.  Nyquist components get the average over their two
/// aliases so that real kernels give real-preserving multipliers.
/// Throws ComputationError carrying the worst frequency on quadrature failure.
SymbolField compute_symbol(const KernelSpec& spec, const TorusGrid& grid, const SymbolOptions& opt = {});
/// Tail symbol as a multiplier table in storage order (all zeros without k2).
std::vector<cplx> tail_symbol_table(const KernelSpec& spec, const TorusGrid& grid, const SymbolOptions& opt = {});

/// Discrete C^tau S^m_{1,0;N} norm: max over |beta| <= N and interior xi of
/// <xi>^{|beta|-m} (sup_x + tau-quotient_x) of the Richardson-extrapolated
/// central difference d_xi^beta p.  Dense 2-D fields are scanned on a
/// subsampled frequency set.
double symbol_class_norm(const SymbolField& p, double m);

struct SectorReport {
  double M_ratio = 0.0;
  double delta = 0.0;
  double delta_prime = 0.0;
  double c_ell = 0.0;
  Point c_ell_argmin{};
  /// min |lambda - z| / max(|lambda|, |z|) for lambda in the delta' sector and z
  /// in the closed complement of the delta sector (sampled).
  double c_geom = 0.0;
  /// Constant used in |lambda - p| >= c max(|lambda|, |xi|^alpha).
  double c_delta_prime = 0.0;
  double R_certified = 0.0;
  /// Admissibility radius: twice the certified threshold.
  double R = 0.0;
  bool valid = true;
  std::string failure;

  bool admissible(cplx lambda) const;
};

SectorReport sector_and_ellipticity(const SymbolField& p, double alpha);
std::string to_text(const SectorReport& r);

/// q_lambda = 1/(lambda - p).  Throws PreconditionError for inadmissible
/// lambda and ComputationError when |lambda - p| < 1e-14 somewhere.
SymbolField resolvent_symbol(const SymbolField& p, cplx lambda, const SectorReport& sector);

void write_csv(std::ostream& os, const SymbolField& p);

}  // namespace levyop
