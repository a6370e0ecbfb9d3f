#include "levyop/spectral_grid.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "levyop/errors.hpp"

namespace levyop {

TorusGrid::TorusGrid(int n, double half_period, int points)
    : n_(n), half_period_(half_period), points_(points) {
  if (n != 1 && n != 2) throw ParameterError("grid dimension must be 1 or 2");
  if (!(half_period > 0.0)) throw ParameterError("grid half-period must be positive");
  if (points < 16 || (points & (points - 1)) != 0)
    throw ParameterError("points per axis must be a power of two >= 16");
  size_ = n == 1 ? static_cast<std::size_t>(points) : static_cast<std::size_t>(points) * points;
}

double TorusGrid::cell_volume() const { return std::pow(spacing(), n_); }

std::array<int, 2> TorusGrid::multi_index(std::size_t idx) const {
  if (n_ == 1) return {static_cast<int>(idx), 0};
  return {static_cast<int>(idx / points_), static_cast<int>(idx % points_)};
}

std::size_t TorusGrid::flat(int i0, int i1) const {
  auto wrap = [&](int i) { return ((i % points_) + points_) % points_; };
  if (n_ == 1) return static_cast<std::size_t>(wrap(i0));
  return static_cast<std::size_t>(wrap(i0)) * points_ + wrap(i1);
}

Point TorusGrid::point(std::size_t idx) const {
  const auto m = multi_index(idx);
  return {coord(m[0]), n_ == 2 ? coord(m[1]) : 0.0};
}

Point TorusGrid::frequency(std::size_t idx) const {
  const auto m = multi_index(idx);
  return {signed_index(m[0]) / half_period_, n_ == 2 ? signed_index(m[1]) / half_period_ : 0.0};
}

bool TorusGrid::touches_nyquist(std::size_t idx) const {
  const auto m = multi_index(idx);
  return m[0] == points_ / 2 || (n_ == 2 && m[1] == points_ / 2);
}

std::size_t TorusGrid::reflected(std::size_t idx) const {
  const auto m = multi_index(idx);
  return flat(-m[0], -m[1]);
}

double TorusGrid::max_frequency() const {
  return std::sqrt(static_cast<double>(n_)) * (points_ / 2) / half_period_;
}

GridFunction::GridFunction(TorusGrid grid, Space space)
    : grid_(grid), space_(space), values_(grid.size(), cplx{}) {}

GridFunction::GridFunction(TorusGrid grid, Space space, std::vector<cplx> values)
    : grid_(grid), space_(space), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw ParameterError("grid function: value count does not match grid");
}

GridFunction GridFunction::sample(const TorusGrid& grid, const std::function<cplx(const Point&)>& f) {
  GridFunction g(grid, Space::physical);
  for (std::size_t i = 0; i < grid.size(); ++i) g.values_[i] = f(grid.point(i));
  return g;
}

GridFunction GridFunction::sample_real(const TorusGrid& grid, const std::function<double(const Point&)>& f) {
  GridFunction g(grid, Space::physical);
  for (std::size_t i = 0; i < grid.size(); ++i) g.values_[i] = f(grid.point(i));
  return g;
}

GridFunction GridFunction::to_frequency() const {
  if (space_ == Space::frequency) return *this;
  GridFunction out(grid_, Space::frequency);
  dft_forward(grid_.dim(), grid_.points(), values_, out.values_);
  return out;
}

GridFunction GridFunction::to_physical() const {
  if (space_ == Space::physical) return *this;
  GridFunction out(grid_, Space::physical);
  dft_inverse(grid_.dim(), grid_.points(), values_, out.values_);
  return out;
}

double GridFunction::max_abs() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v));
  return m;
}

double GridFunction::min_real() const {
  double m = values_.empty() ? 0.0 : values_[0].real();
  for (const auto& v : values_) m = std::min(m, v.real());
  return m;
}

double GridFunction::max_imag() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v.imag()));
  return m;
}

std::vector<double> GridFunction::real_part() const {
  std::vector<double> out(values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) out[i] = values_[i].real();
  return out;
}

cplx GridFunction::interpolate(const Point& x) const {
  const GridFunction spec = to_frequency();
  const int N = grid_.points();
  const double x0 = grid_.coord(0);
  // Per-axis phase tables; the Nyquist column uses cos to keep real data real.
  std::array<std::vector<cplx>, 2> ph;
  for (int d = 0; d < grid_.dim(); ++d) {
    ph[d].resize(N);
    const double t = x[d] - x0;
    for (int k = 0; k < N; ++k) {
      const double xi = grid_.signed_index(k) / grid_.half_period();
      ph[d][k] = k == N / 2 ? cplx(std::cos(t * xi), 0.0) : std::polar(1.0, t * xi);
    }
  }
  cplx acc{};
  if (grid_.dim() == 1) {
    for (int k = 0; k < N; ++k) acc += spec.values_[k] * ph[0][k];
  } else {
    for (int k0 = 0; k0 < N; ++k0) {
      cplx row{};
      for (int k1 = 0; k1 < N; ++k1) row += spec.values_[static_cast<std::size_t>(k0) * N + k1] * ph[1][k1];
      acc += row * ph[0][k0];
    }
  }
  return acc / static_cast<double>(grid_.size());
}

void GridFunction::require_compatible(const GridFunction& o) const {
  if (!(grid_ == o.grid_)) throw ParameterError("grid function: grid mismatch");
  if (space_ != o.space_) throw ParameterError("grid function: space tag mismatch");
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
  require_compatible(o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
  require_compatible(o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

GridFunction& GridFunction::operator*=(cplx c) {
  for (auto& v : values_) v *= c;
  return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(cplx c, GridFunction a) { return a *= c; }

GridFunction apply_multiplier(const GridFunction& f, const std::function<cplx(const Point&)>& m) {
  GridFunction spec = f.to_frequency();
  const auto& g = f.grid();
  for (std::size_t i = 0; i < g.size(); ++i) spec[i] *= m(g.frequency(i));
  return spec.to_physical();
}

GridFunction apply_multiplier(const GridFunction& f, const std::vector<cplx>& m) {
  if (m.size() != f.size()) throw ParameterError("multiplier table size mismatch");
  GridFunction spec = f.to_frequency();
  for (std::size_t i = 0; i < m.size(); ++i) spec[i] *= m[i];
  return spec.to_physical();
}

double DyadicPartition::profile(int j, double r) {
  if (j == 0) return unit_ramp(r);
  return unit_ramp(std::ldexp(r, -j)) - unit_ramp(std::ldexp(r, -(j - 1)));
}

DyadicPartition::DyadicPartition(const TorusGrid& grid) : grid_(grid) {
  j_max_ = static_cast<int>(std::ceil(std::log2(grid.max_frequency()))) + 1;
  bumps_.assign(j_max_ + 1, std::vector<double>(grid.size(), 0.0));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = grid.frequency_norm(i);
    for (int j = 0; j < j_max_; ++j) bumps_[j][i] = profile(j, r);
    // Everything above shell J_max - 1 goes into the last shell.
    bumps_[j_max_][i] = 1.0 - unit_ramp(std::ldexp(r, -(j_max_ - 1)));
  }
}

GridFunction DyadicPartition::filter(const GridFunction& f, int j) const {
  if (!(f.grid() == grid_)) throw ParameterError("partition/grid mismatch");
  if (j < 0 || j > j_max_) throw ParameterError("shell index out of range");
  GridFunction spec = f.to_frequency();
  for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= bumps_[j][i];
  return spec.to_physical();
}

DyadicPartition build_dyadic_partition(const TorusGrid& grid) { return DyadicPartition(grid); }

std::vector<double> shell_sup_norms(const GridFunction& f, const DyadicPartition& partition) {
  if (f.space() != Space::physical) throw ParameterError("holder_zygmund_norm expects a physical-space function");
  if (!(f.grid() == partition.grid())) throw ParameterError("partition/grid mismatch");
  const GridFunction spec = f.to_frequency();
  const int shells = partition.max_shell() + 1;
  std::vector<double> out(shells, 0.0);
#pragma omp parallel for schedule(dynamic)
  for (int j = 0; j < shells; ++j) {
    GridFunction s = spec;
    const auto& w = partition.shell(j);
    bool any = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
      s[i] *= w[i];
      any = any || w[i] != 0.0;
    }
    out[j] = any ? s.to_physical().max_abs() : 0.0;
  }
  return out;
}

double holder_zygmund_norm(const GridFunction& f, double s, const DyadicPartition& partition) {
  if (!(s > 0.0)) throw ParameterError("Holder-Zygmund index s must be positive");
  const auto shells = shell_sup_norms(f, partition);
  double best = 0.0;
  for (std::size_t j = 0; j < shells.size(); ++j)
    best = std::max(best, std::pow(2.0, static_cast<double>(j) * s) * shells[j]);
  return best;
}

std::vector<TailNorm> tail_decay_check(const GridFunction& f_in, double s, const std::vector<double>& radii) {
  if (f_in.space() != Space::physical) throw ParameterError("tail_decay_check expects a physical-space function");
  if (!(s > 0.0 && s < 2.0)) throw ParameterError("tail_decay_check supports 0 < s < 2");
  const auto& g = f_in.grid();
  const double half_width = kPi * g.half_period();
  for (double r : radii)
    if (!(r >= 0.0) || r >= half_width) throw ParameterError("tail radius must lie in [0, torus half-width)");
  const int N = g.points();
  const int n = g.dim();
  const double h = g.spacing();
  const auto& v = f_in.values();
  std::vector<TailNorm> out;
  for (double R : radii) {
    TailNorm t;
    t.radius = R;
    auto outside = [&](std::size_t idx) { return norm(g.point(idx), n) >= R; };
    for (std::size_t i = 0; i < g.size(); ++i)
      if (outside(i)) t.sup_part = std::max(t.sup_part, std::abs(v[i]));
    for (int step = 1; step < N / 2; step *= 2) {
      const double dist = step * h;
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (!outside(i)) continue;
        const auto m = g.multi_index(i);
        for (int d = 0; d < n; ++d) {
          auto shifted = [&](int k) {
            auto mm = m;
            mm[d] += k * step;
            return g.flat(mm[0], mm[1]);
          };
          const std::size_t ip = shifted(1);
          if (!outside(ip)) continue;
          double diff;
          if (s < 1.0) {
            diff = std::abs(v[ip] - v[i]);
          } else {
            const std::size_t im = shifted(-1);
            if (!outside(im)) continue;
            diff = std::abs(v[ip] - 2.0 * v[i] + v[im]);
          }
          t.quotient_part = std::max(t.quotient_part, diff / std::pow(dist, s));
        }
      }
    }
    out.push_back(t);
  }
  return out;
}

void write_csv(std::ostream& os, const GridFunction& f) {
  const auto& g = f.grid();
  const bool phys = f.space() == Space::physical;
  if (g.dim() == 1)
    os << (phys ? "i0,x0,re,im\n" : "k0,xi0,re,im\n");
  else
    os << (phys ? "i0,i1,x0,x1,re,im\n" : "k0,k1,xi0,xi1,re,im\n");
  os << std::setprecision(17);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto m = g.multi_index(i);
    const Point c = phys ? g.point(i) : g.frequency(i);
    os << m[0] << ',';
    if (g.dim() == 2) os << m[1] << ',';
    os << c[0] << ',';
    if (g.dim() == 2) os << c[1] << ',';
    os << f[i].real() << ',' << f[i].imag() << '\n';
  }
}

GridFunction read_csv(std::istream& is, const TorusGrid& grid, Space space) {
  std::string line;
  if (!std::getline(is, line)) throw ParameterError("read_csv: empty input");
  GridFunction f(grid, space);
  std::size_t count = 0;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> cols;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cols.push_back(std::stod(cell));
    const std::size_t expect = grid.dim() == 1 ? 4 : 6;
    if (cols.size() != expect) throw ParameterError("read_csv: wrong column count on line " + std::to_string(lineno));
    const int i0 = static_cast<int>(cols[0]);
    const int i1 = grid.dim() == 2 ? static_cast<int>(cols[1]) : 0;
    f[grid.flat(i0, i1)] = cplx(cols[expect - 2], cols[expect - 1]);
    ++count;
  }
  if (count != grid.size()) throw ParameterError("read_csv: expected " + std::to_string(grid.size()) + " rows");
  return f;
}

}  // namespace levyop
