#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "levyop/statistics.hpp"

using namespace levyop;

TEST_CASE("compensated sum keeps small addends") {
  CompensatedSum s;
  s.add(1e16);
  for (int i = 0; i < 1000; ++i) s.add(1.0);
  s.add(-1e16);
  CHECK(s.value() == 1000.0);
}

TEST_CASE("mean and standard error") {
  const std::vector<double> x{1, 2, 3, 4};
  const MeanEstimate m = mean_and_se(x);
  CHECK(m.mean == 2.5);
  CHECK(m.se == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  CHECK(MeanEstimate{}.z() == 0.0);
}

TEST_CASE("quantile interpolates") {
  CHECK(quantile({3, 1, 2, 4}, 0.5) == doctest::Approx(2.5));
  CHECK(quantile({3, 1, 2, 4}, 1.0) == 4.0);
}

TEST_CASE("KS distance of shifted samples") {
  CHECK(ks_distance({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(ks_distance({1, 2}, {3, 4}) == 1.0);
  CHECK(ks_distance({1, 2, 3, 4}, {3, 4, 5, 6}) == doctest::Approx(0.5));
}

TEST_CASE("bootstrap null quantile is near the asymptotic value") {
  std::mt19937_64 eng(4);
  std::normal_distribution<double> nd;
  std::vector<double> a(2000), b(2000);
  for (auto& v : a) v = nd(eng);
  for (auto& v : b) v = nd(eng);
  // Kolmogorov 95% point: 1.358 sqrt(2/n).
  const double q = ks_bootstrap_quantile(a, b, 0.95, 200, 1);
  CHECK(q == doctest::Approx(1.358 * std::sqrt(2.0 / 2000)).epsilon(0.2));
}

TEST_CASE("chi-square p-values") {
  CHECK(chi_square_pvalue(0.0, 3) == doctest::Approx(1.0));
  CHECK(chi_square_pvalue(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-8));
}

TEST_CASE("Poisson chi-square accepts Poisson counts and rejects a wrong rate") {
  std::mt19937_64 eng(8);
  std::poisson_distribution<long> pd(3.0);
  std::vector<long> counts(5000);
  for (auto& c : counts) c = pd(eng);
  CHECK(poisson_chi_square(counts, 3.0).pvalue > 1e-3);
  CHECK(poisson_chi_square(counts, 3.3).pvalue < 1e-6);
}

TEST_CASE("skewness of a symmetric sample") {
  const std::vector<double> x{-2, -1, 0, 1, 2};
  CHECK(skewness(x).skewness == doctest::Approx(0.0));
}

TEST_CASE("stream engines are deterministic and distinct") {
  auto a = stream_engine(1, 0), b = stream_engine(1, 0), c = stream_engine(1, 1);
  const auto va = a();
  CHECK(va == b());
  CHECK(va != c());
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
}
