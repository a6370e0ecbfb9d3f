#include "doctest.h"
#include "levyop/errors.hpp"
#include "levyop/path_space.hpp"

using namespace levyop;

TEST_CASE("constant path has no oscillation") {
  CadlagPath w;
  w.start = {0.7, 0};
  for (double rho : {0.01, 0.3, 0.99}) CHECK(gamma_k(w, 1.0, rho) == 0.0);
}

TEST_CASE("single jump modulus") {
  const CadlagPath w = unit_step(0.3);
  CHECK(gamma_k(w, 1.0, 0.3) == 0.0);
  CHECK(gamma_k(w, 1.0, 0.31) == 1.0);
  CHECK(gamma_k(w, 1.0, 0.7) == 1.0);
  // The last interval may be short when exempted.
  const CadlagPath late = unit_step(0.95);
  CHECK(gamma_k(late, 1.0, 0.2) == 1.0);
  CHECK(gamma_k(late, 1.0, 0.2, true) == 0.0);
}

TEST_CASE("modulus parameter errors") {
  const CadlagPath w = unit_step(0.5);
  CHECK_THROWS_AS(gamma_k(w, 1.0, 1.0), ParameterError);
  CHECK_THROWS_AS(gamma_k(w, 1.0, 0.0), ParameterError);
}

TEST_CASE("uniform distance of unit steps") {
  const UniformDistance d = d_uc(unit_step(0.2), unit_step(0.6));
  CHECK(d.leading_term == 0.5);
  CHECK(d.value == doctest::Approx(1.0).epsilon(1e-15));
  // A step after time 1 is invisible to the first summand.
  const UniformDistance late = d_uc(unit_step(0.2), unit_step(1.5));
  CHECK(late.leading_term == 0.5);
  const UniformDistance far = d_uc(unit_step(1.5), unit_step(2.5));
  CHECK(far.leading_term == 0.0);
  CHECK(far.value == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("values along a drift segment are interpolated") {
  CadlagPath w;
  w.start = {0, 0};
  w.jump_times = {1.0};
  w.left_limits = {{0.5, 0}};
  w.values = {{2.0, 0}};
  CHECK(w.at(0.5)[0] == doctest::Approx(0.25));
  CHECK(w.at(1.0)[0] == 2.0);
  CHECK(oscillation(w, 0.0, 1.0) == doctest::Approx(0.5));
  CHECK(sup_distance(w, unit_step(5.0), 2.0) == doctest::Approx(2.0));
}

TEST_CASE("ensemble diagnostics") {
  const std::vector<CadlagPath> paths{unit_step(0.2), unit_step(0.5), CadlagPath{}, unit_step(0.9)};
  const PathDiagnostics d = path_diagnostics(paths, 1.0, {0.05, 0.15, 0.4});
  CHECK(d.sup_gamma[0] == 0.0);
  CHECK(d.sup_gamma[1] == 1.0);
  CHECK(d.mean_gamma[2] == doctest::Approx(0.5));
  CHECK(d.sup_bound == 1.0);
  CHECK(d.pair_distances.size() == 2);
}
