#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace levyop {

/// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double x);
  CompensatedSum& operator+=(const CompensatedSum& o);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct MeanEstimate {
  double mean = 0.0;
  /// Standard error of the mean (sample standard deviation / sqrt(count)).
  double se = 0.0;
  std::size_t count = 0;
  /// |mean| / se, or 0 when both vanish.
  double z() const;
};

MeanEstimate mean_and_se(std::span<const double> xs);

/// Sample skewness and its large-sample standard error sqrt(6/n).
struct SkewnessEstimate {
  double skewness = 0.0;
  double se = 0.0;
};
SkewnessEstimate skewness(std::span<const double> xs);

/// Linear-interpolation quantile of the sample, q in [0, 1].
double quantile(std::vector<double> xs, double q);

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_distance(std::vector<double> a, std::vector<double> b);

/// q-quantile of the KS statistic under the null that both samples come from
/// one law, by resampling from the pooled sample.
double ks_bootstrap_quantile(std::span<const double> a, std::span<const double> b, double q, int replicates,
                             std::uint64_t seed);

/// Upper-tail p-value of a chi-square statistic.
double chi_square_pvalue(double statistic, double dof);

struct PoissonFit {
  double statistic = 0.0;
  double dof = 0.0;
  double pvalue = 1.0;
};

/// Pearson chi-square of integer counts against Poisson(rate).  Cells are
/// merged until every expected count is at least 5.
PoissonFit poisson_chi_square(std::span<const long> counts, double rate);

/// Deterministic per-stream generator: splitmix64(root + golden * (index + 1))
/// seeds a 64-bit Mersenne twister.
std::mt19937_64 stream_engine(std::uint64_t root, std::uint64_t index);
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace levyop
