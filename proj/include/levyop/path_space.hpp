#pragma once

#include <vector>

#include "levyop/smooth.hpp"

namespace levyop {

/// Right-continuous path with finitely many jumps.  Between jumps the path is
/// either constant or follows a drift monotone along e_1, so its values on any
/// stretch lie on the segment between the recorded end states.  The path is
/// frozen after the last recorded time.
struct CadlagPath {
  int n = 1;
  Point start{};
  std::vector<double> jump_times;
  /// omega(t-) at each jump time.
  std::vector<Point> left_limits;
  /// omega(t) at each jump time.
  std::vector<Point> values;

  /// Value at t (right-continuous; between jumps the drift segment is
  /// interpolated linearly between its recorded ends).
  Point at(double t) const;
};

/// Unit step 1_{[s, inf)} in the first coordinate.
CadlagPath unit_step(double s, int n = 1);

/// sup_{t <= horizon} |omega_1(t) - omega_2(t)|, evaluated at all knots of
/// both paths (exact for step paths).
double sup_distance(const CadlagPath& a, const CadlagPath& b, double horizon);

struct UniformDistance {
  /// 2^{-1} min{1, sup_{t <= 1} |...|}
  double leading_term = 0.0;
  /// Series truncated after `terms` summands (tail below 2^{-terms}).
  double value = 0.0;
};

/// d_uc = sum_{k >= 1} 2^{-k} min{1, sup_{t <= k} |omega_1(t) - omega_2(t)|}.
UniformDistance d_uc(const CadlagPath& a, const CadlagPath& b, int terms = 60);

/// Oscillation sup_{s,t in [a,b)} |omega(s) - omega(t)|.
double oscillation(const CadlagPath& w, double a, double b);

/// gamma_k(omega, rho): infimum over partitions 0 = t_0 < ... < t_L = k with
/// mesh >= rho of the largest oscillation on [t_{i-1}, t_i).  Partition points
/// are restricted to jump times and the endpoints.  With exempt_last the final
/// interval may be shorter than rho.  Throws ParameterError for rho >= k or
/// rho <= 0.
double gamma_k(const CadlagPath& w, double k, double rho, bool exempt_last = false);

struct PathDiagnostics {
  double k = 1.0;
  std::vector<double> rho;
  /// sup and mean over paths of gamma_k(., rho).
  std::vector<double> sup_gamma;
  std::vector<double> mean_gamma;
  /// sup over paths of sup_{t <= k} |omega(t)|.
  double sup_bound = 0.0;
  /// d_uc between consecutive path pairs (0,1), (2,3), ...
  std::vector<double> pair_distances;
};

PathDiagnostics path_diagnostics(const std::vector<CadlagPath>& paths, double k, const std::vector<double>& rho_list);

}  // namespace levyop
