#include <cmath>
#include <sstream>

#include "doctest.h"
#include "levyop/errors.hpp"
#include "levyop/spectral_grid.hpp"

using namespace levyop;

TEST_CASE("grid construction rejects bad sizes") {
  CHECK_THROWS_AS(TorusGrid(1, 1.0, 100), ParameterError);
  CHECK_THROWS_AS(TorusGrid(3, 1.0, 64), ParameterError);
  CHECK_THROWS_AS(TorusGrid(1, -1.0, 64), ParameterError);
  CHECK_NOTHROW(TorusGrid(2, 2.0, 32));
}

TEST_CASE("FFT round trip and interpolation of a band-limited function") {
  const TorusGrid g(1, 1.0, 64);
  const auto f = GridFunction::sample_real(g, [](const Point& x) { return std::cos(3 * x[0]) + 0.5 * std::sin(x[0]); });
  const GridFunction back = f.to_frequency().to_physical();
  CHECK((back - f).max_abs() < 1e-13);
  const double x = 0.377;
  CHECK(f.interpolate({x, 0}).real() == doctest::Approx(std::cos(3 * x) + 0.5 * std::sin(x)).epsilon(1e-12));
}

TEST_CASE("dyadic partition sums to one") {
  const TorusGrid g(1, 1.0, 256);
  const DyadicPartition part(g);
  CHECK(part.max_shell() == 8);
  double worst = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    double s = 0.0;
    for (int j = 0; j <= part.max_shell(); ++j) s += part.weight(j, k);
    worst = std::max(worst, std::abs(s - 1.0));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("shell profile support") {
  CHECK(DyadicPartition::profile(1, 4.0) == 0.0);
  CHECK(DyadicPartition::profile(0, 3.0) == 0.0);
  CHECK(DyadicPartition::profile(1, 3.0) + DyadicPartition::profile(2, 3.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("Holder-Zygmund norm of zero and of single modes") {
  const TorusGrid g(1, 1.0, 256);
  const DyadicPartition part(g);
  const GridFunction zero(g, Space::physical);
  CHECK(holder_zygmund_norm(zero, 0.5, part) == 0.0);
  const double s = 0.5;
  for (int j = 1; j <= 6; ++j) {
    const double k = std::ldexp(1.0, j);
    const auto f = GridFunction::sample_real(g, [k](const Point& x) { return std::cos(k * x[0]); });
    const double v = holder_zygmund_norm(f, s, part);
    CHECK(v >= std::pow(2.0, j * s) * (1 - 1e-12));
    CHECK(v <= std::pow(2.0, j * s + 1));
  }
}

TEST_CASE("Holder-Zygmund norm of two modes by brute-force filtering") {
  const TorusGrid g(1, 1.0, 256);
  const DyadicPartition part(g);
  const auto f = GridFunction::sample_real(g, [](const Point& x) { return std::cos(x[0]) + std::cos(8 * x[0]); });
  // Filter by hand: the shell weights at |xi| = 1 and 8 scale each cosine.
  double oracle = 0.0;
  for (int j = 0; j <= part.max_shell(); ++j) {
    const double w1 = DyadicPartition::profile(j, 1.0), w8 = DyadicPartition::profile(j, 8.0);
    double sup = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = g.coord(int(i));
      sup = std::max(sup, std::abs(w1 * std::cos(x) + w8 * std::cos(8 * x)));
    }
    oracle = std::max(oracle, std::ldexp(1.0, j) * sup);
  }
  CHECK(holder_zygmund_norm(f, 1.0, part) == doctest::Approx(oracle).epsilon(1e-10));
}

TEST_CASE("invalid smoothness is rejected") {
  const TorusGrid g(1, 1.0, 64);
  const DyadicPartition part(g);
  const GridFunction f(g, Space::physical);
  CHECK_THROWS_AS(holder_zygmund_norm(f, 0.0, part), ParameterError);
  CHECK_THROWS_AS(holder_zygmund_norm(f.to_frequency(), 0.5, part), ParameterError);
}

TEST_CASE("tail decay of a Gaussian") {
  const TorusGrid g(1, 4.0, 512);
  const auto f = GridFunction::sample_real(g, [](const Point& x) { return std::exp(-x[0] * x[0]); });
  const auto tails = tail_decay_check(f, 0.5, {2.0, 4.0, 6.0});
  CHECK(tails[0].total() > tails[1].total());
  CHECK(tails[1].total() > tails[2].total());

  const auto one = GridFunction::sample_real(g, [](const Point&) { return 1.0; });
  const auto flat = tail_decay_check(one, 0.5, {2.0});
  CHECK(flat[0].sup_part == doctest::Approx(1.0));
  CHECK(flat[0].quotient_part == doctest::Approx(0.0));
}

TEST_CASE("tail check vanishes outside a compact bump") {
  const TorusGrid g(1, 4.0, 512);
  const auto f = GridFunction::sample_real(g, [](const Point& x) {
    const double t = x[0] * x[0];
    return t < 1.0 ? std::exp(-1.0 / (1.0 - t)) : 0.0;
  });
  CHECK(tail_decay_check(f, 0.5, {1.5})[0].total() == 0.0);
}

TEST_CASE("CSV round trip") {
  const TorusGrid g(2, 1.0, 16);
  const auto f = GridFunction::sample_real(g, [](const Point& x) { return std::sin(x[0]) * std::cos(2 * x[1]); });
  std::stringstream ss;
  write_csv(ss, f);
  const GridFunction back = read_csv(ss, g);
  CHECK((back - f).max_abs() < 1e-12);
}

TEST_CASE("mismatched grids cannot be combined") {
  const GridFunction a(TorusGrid(1, 1.0, 32), Space::physical), b(TorusGrid(1, 1.0, 64), Space::physical);
  CHECK_THROWS_AS(a + b, ParameterError);
}
