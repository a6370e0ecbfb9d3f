#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "levyop/fft.hpp"
#include "levyop/smooth.hpp"

namespace levyop {

/// Uniform periodic grid on [-l pi, l pi)^n with N points per axis.  Storage
/// is row-major with axis 0 slowest; frequencies are k / l with the signed
/// index k in [-N/2, N/2).
class TorusGrid {
 public:
  TorusGrid() = default;
  /// Throws ParameterError unless n in {1,2}, l > 0, N >= 16 a power of two.
  TorusGrid(int n, double half_period, int points);

  int dim() const { return n_; }
  double half_period() const { return half_period_; }
  int points() const { return points_; }
  std::size_t size() const { return size_; }
  double spacing() const { return 2.0 * kPi * half_period_ / points_; }
  double length() const { return 2.0 * kPi * half_period_; }
  double cell_volume() const;

  /// Signed frequency index of the unsigned storage index k.
  int signed_index(int k) const { return k < points_ / 2 ? k : k - points_; }
  double coord(int i) const { return -kPi * half_period_ + i * spacing(); }

  std::array<int, 2> multi_index(std::size_t idx) const;
  std::size_t flat(int i0, int i1 = 0) const;
  Point point(std::size_t idx) const;
  Point frequency(std::size_t idx) const;
  double frequency_norm(std::size_t idx) const { return norm(frequency(idx), n_); }
  /// True if some component sits on the (unpaired) Nyquist index -N/2.
  bool touches_nyquist(std::size_t idx) const;
  /// Storage index of -xi.
  std::size_t reflected(std::size_t idx) const;
  /// Largest |xi| on the lattice.
  double max_frequency() const;

  bool operator==(const TorusGrid& o) const {
    return n_ == o.n_ && half_period_ == o.half_period_ && points_ == o.points_;
  }

 private:
  int n_ = 1;
  double half_period_ = 1.0;
  int points_ = 16;
  std::size_t size_ = 16;
};

enum class Space { physical, frequency };

/// Complex samples on a torus grid, tagged with the space they live in.  The
/// frequency representation is the raw DFT in storage order.
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(TorusGrid grid, Space space);
  GridFunction(TorusGrid grid, Space space, std::vector<cplx> values);

  static GridFunction sample(const TorusGrid& grid, const std::function<cplx(const Point&)>& f);
  static GridFunction sample_real(const TorusGrid& grid, const std::function<double(const Point&)>& f);

  const TorusGrid& grid() const { return grid_; }
  Space space() const { return space_; }
  std::vector<cplx>& values() { return values_; }
  const std::vector<cplx>& values() const { return values_; }
  cplx& operator[](std::size_t i) { return values_[i]; }
  const cplx& operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  GridFunction to_frequency() const;
  GridFunction to_physical() const;

  double max_abs() const;
  double min_real() const;
  /// max |Im| over the physical samples.
  double max_imag() const;
  std::vector<double> real_part() const;

  /// Trigonometric interpolation at an arbitrary point (physical input).
  cplx interpolate(const Point& x) const;

  GridFunction& operator+=(const GridFunction& o);
  GridFunction& operator-=(const GridFunction& o);
  GridFunction& operator*=(cplx c);

 private:
  void require_compatible(const GridFunction& o) const;

  TorusGrid grid_;
  Space space_ = Space::physical;
  std::vector<cplx> values_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(cplx c, GridFunction a);

/// Multiplies the spectrum by m(xi) and returns to physical space.
GridFunction apply_multiplier(const GridFunction& f, const std::function<cplx(const Point&)>& m);
/// Same with a table of values in storage order.
GridFunction apply_multiplier(const GridFunction& f, const std::vector<cplx>& m);

/// Telescoping dyadic partition of unity on the frequency lattice.
class DyadicPartition {
 public:
  explicit DyadicPartition(const TorusGrid& grid);

  const TorusGrid& grid() const { return grid_; }
  int max_shell() const { return j_max_; }
  double weight(int j, std::size_t idx) const { return bumps_[j][idx]; }
  const std::vector<double>& shell(int j) const { return bumps_[j]; }

  /// Profile value at |xi| = r for shell j < J_max (last shell absorbs the rest).
  static double profile(int j, double r);

  /// phi_j(D) f for a physical input.
  GridFunction filter(const GridFunction& f, int j) const;

 private:
  TorusGrid grid_;
  int j_max_ = 0;
  std::vector<std::vector<double>> bumps_;
};

DyadicPartition build_dyadic_partition(const TorusGrid& grid);

/// max_k 2^{ks} ||phi_k(D) f||_inf.  Throws ParameterError for s <= 0 or a
/// frequency-space input.
double holder_zygmund_norm(const GridFunction& f, double s, const DyadicPartition& partition);
/// Per-shell values ||phi_k(D) f||_inf (no weights).
std::vector<double> shell_sup_norms(const GridFunction& f, const DyadicPartition& partition);

struct TailNorm {
  double radius = 0.0;
  double sup_part = 0.0;
  double quotient_part = 0.0;
  double total() const { return sup_part + quotient_part; }
};

/// Finite-difference C^s norm of f restricted to the complement of B_R for
/// each radius: sup plus the dyadic quotient over grid pairs outside the ball
/// (first differences for s < 1, second differences for 1 <= s < 2).
std::vector<TailNorm> tail_decay_check(const GridFunction& f, double s, const std::vector<double>& radii);

/// CSV with index columns, coordinate columns, re, im.
void write_csv(std::ostream& os, const GridFunction& f);
GridFunction read_csv(std::istream& is, const TorusGrid& grid, Space space = Space::physical);

}  // namespace levyop
