#include "levyop/path_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "levyop/errors.hpp"

namespace levyop {

namespace {

double dist(const Point& a, const Point& b, int n) {
  Point d{a[0] - b[0], a[1] - b[1]};
  return norm(d, n);
}

// States visited on [a, b): start-of-stretch values and left limits of the
// stretches inside the window.  Drift segments are straight, so the diameter
// of these end states is the diameter of the whole piece.
std::vector<Point> window_states(const CadlagPath& w, double a, double b) {
  std::vector<Point> pts;
  pts.push_back(w.at(a));
  for (std::size_t i = 0; i < w.jump_times.size(); ++i) {
    const double t = w.jump_times[i];
    if (t <= a) continue;
    if (t >= b) {
      pts.push_back(w.left_limits[i]);
      return pts;
    }
    pts.push_back(w.left_limits[i]);
    pts.push_back(w.values[i]);
  }
  // Frozen after the last jump: nothing else to add.
  return pts;
}

double diameter(const std::vector<Point>& pts, int n) {
  double d = 0.0;
  if (n == 1) {
    double lo = pts.front()[0], hi = lo;
    for (const auto& p : pts) {
      lo = std::min(lo, p[0]);
      hi = std::max(hi, p[0]);
    }
    return hi - lo;
  }
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, dist(pts[i], pts[j], n));
  return d;
}

}  // namespace

Point CadlagPath::at(double t) const {
  if (jump_times.empty() || t < jump_times.front()) {
    if (jump_times.empty()) return start;
    const double t1 = jump_times.front();
    if (t <= 0.0 || t1 <= 0.0) return start;
    const double w = std::clamp(t / t1, 0.0, 1.0);
    return {start[0] + w * (left_limits[0][0] - start[0]), start[1] + w * (left_limits[0][1] - start[1])};
  }
  const auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - jump_times.begin()) - 1;
  if (i + 1 == jump_times.size()) return values[i];
  const double t0 = jump_times[i], t1 = jump_times[i + 1];
  const double w = (t - t0) / (t1 - t0);
  return {values[i][0] + w * (left_limits[i + 1][0] - values[i][0]),
          values[i][1] + w * (left_limits[i + 1][1] - values[i][1])};
}

CadlagPath unit_step(double s, int n) {
  CadlagPath w;
  w.n = n;
  w.jump_times = {s};
  w.left_limits = {Point{0.0, 0.0}};
  w.values = {Point{1.0, 0.0}};
  if (s == 0.0) w.start = Point{1.0, 0.0};
  return w;
}

double sup_distance(const CadlagPath& a, const CadlagPath& b, double horizon) {
  const int n = std::max(a.n, b.n);
  double d = dist(a.at(0.0), b.at(0.0), n);
  auto visit = [&](const CadlagPath& p) {
    for (std::size_t i = 0; i < p.jump_times.size(); ++i) {
      const double t = p.jump_times[i];
      if (t > horizon) break;
      // left limits of both paths at t, then right values
      const Point other_left = [&] {
        const CadlagPath& q = (&p == &a) ? b : a;
        const auto it = std::lower_bound(q.jump_times.begin(), q.jump_times.end(), t);
        if (it != q.jump_times.end() && *it == t)
          return q.left_limits[static_cast<std::size_t>(it - q.jump_times.begin())];
        return q.at(t);
      }();
      const Point other_right = ((&p == &a) ? b : a).at(t);
      d = std::max(d, dist(p.left_limits[i], other_left, n));
      d = std::max(d, dist(p.values[i], other_right, n));
    }
  };
  visit(a);
  visit(b);
  d = std::max(d, dist(a.at(horizon), b.at(horizon), n));
  return d;
}

UniformDistance d_uc(const CadlagPath& a, const CadlagPath& b, int terms) {
  if (terms < 1) throw ParameterError("d_uc: need at least one term");
  UniformDistance out;
  for (int k = 1; k <= terms; ++k) {
    const double term = std::ldexp(std::min(1.0, sup_distance(a, b, k)), -k);
    if (k == 1) out.leading_term = term;
    out.value += term;
  }
  return out;
}

double oscillation(const CadlagPath& w, double a, double b) {
  if (!(b > a)) return 0.0;
  return diameter(window_states(w, a, b), w.n);
}

double gamma_k(const CadlagPath& w, double k, double rho, bool exempt_last) {
  if (!(rho > 0.0) || !(rho < k)) throw ParameterError("gamma_k: need 0 < rho < k");
  std::vector<double> pts{0.0};
  for (double t : w.jump_times)
    if (t > 0.0 && t < k) pts.push_back(t);
  pts.push_back(k);
  const std::size_t m = pts.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> best(m, inf);
  best[0] = 0.0;
  for (std::size_t j = 1; j < m; ++j) {
    const bool last = j + 1 == m;
    for (std::size_t i = 0; i < j; ++i) {
      if (best[i] == inf) continue;
      if (pts[j] - pts[i] < rho && !(last && exempt_last)) continue;
      best[j] = std::min(best[j], std::max(best[i], oscillation(w, pts[i], pts[j])));
    }
  }
  return best[m - 1];
}

PathDiagnostics path_diagnostics(const std::vector<CadlagPath>& paths, double k, const std::vector<double>& rho_list) {
  PathDiagnostics d;
  d.k = k;
  d.rho = rho_list;
  d.sup_gamma.assign(rho_list.size(), 0.0);
  d.mean_gamma.assign(rho_list.size(), 0.0);
  if (paths.empty()) return d;
  for (const auto& w : paths) {
    for (std::size_t r = 0; r < rho_list.size(); ++r) {
      const double g = gamma_k(w, k, rho_list[r]);
      d.sup_gamma[r] = std::max(d.sup_gamma[r], g);
      d.mean_gamma[r] += g / static_cast<double>(paths.size());
    }
    const Point zero{0.0, 0.0};
    for (const auto& p : window_states(w, 0.0, k)) d.sup_bound = std::max(d.sup_bound, dist(p, zero, w.n));
    d.sup_bound = std::max(d.sup_bound, dist(w.at(k), zero, w.n));
  }
  for (std::size_t i = 0; i + 1 < paths.size(); i += 2) d.pair_distances.push_back(d_uc(paths[i], paths[i + 1]).value);
  return d;
}

}  // namespace levyop
