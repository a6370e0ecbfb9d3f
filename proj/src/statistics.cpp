#include "levyop/statistics.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>

#include "levyop/errors.hpp"

namespace levyop {

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x))
    comp_ += (sum_ - t) + x;
  else
    comp_ += (x - t) + sum_;
  sum_ = t;
}

CompensatedSum& CompensatedSum::operator+=(const CompensatedSum& o) {
  add(o.sum_);
  add(o.comp_);
  return *this;
}

double MeanEstimate::z() const {
  if (se > 0.0) return std::abs(mean) / se;
  return mean == 0.0 ? 0.0 : INFINITY;
}

MeanEstimate mean_and_se(std::span<const double> xs) {
  MeanEstimate e;
  e.count = xs.size();
  if (xs.empty()) return e;
  CompensatedSum s;
  for (double x : xs) s.add(x);
  e.mean = s.value() / static_cast<double>(xs.size());
  if (xs.size() < 2) return e;
  CompensatedSum v;
  for (double x : xs) v.add((x - e.mean) * (x - e.mean));
  const double var = v.value() / static_cast<double>(xs.size() - 1);
  e.se = std::sqrt(var / static_cast<double>(xs.size()));
  return e;
}

SkewnessEstimate skewness(std::span<const double> xs) {
  SkewnessEstimate out;
  const std::size_t n = xs.size();
  if (n < 3) throw ParameterError("skewness: need at least three samples");
  const double mean = mean_and_se(xs).mean;
  CompensatedSum m2, m3;
  for (double x : xs) {
    const double d = x - mean;
    m2.add(d * d);
    m3.add(d * d * d);
  }
  const double v = m2.value() / n;
  out.skewness = v > 0.0 ? (m3.value() / n) / std::pow(v, 1.5) : 0.0;
  out.se = std::sqrt(6.0 / static_cast<double>(n));
  return out;
}

double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) throw ParameterError("quantile: empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw ParameterError("quantile: q outside [0,1]");
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const std::size_t i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= xs.size()) return xs.back();
  const double w = pos - static_cast<double>(i);
  return (1.0 - w) * xs[i] + w * xs[i + 1];
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw ParameterError("ks_distance: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return d;
}

double ks_bootstrap_quantile(std::span<const double> a, std::span<const double> b, double q, int replicates,
                             std::uint64_t seed) {
  if (replicates < 10) throw ParameterError("ks_bootstrap_quantile: need at least 10 replicates");
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::vector<double> stats(static_cast<std::size_t>(replicates));
#pragma omp parallel for schedule(static)
  for (int r = 0; r < replicates; ++r) {
    auto eng = stream_engine(seed, static_cast<std::uint64_t>(r));
    std::uniform_int_distribution<std::size_t> pick(0, pooled.size() - 1);
    std::vector<double> ra(a.size()), rb(b.size());
    for (auto& x : ra) x = pooled[pick(eng)];
    for (auto& x : rb) x = pooled[pick(eng)];
    stats[static_cast<std::size_t>(r)] = ks_distance(std::move(ra), std::move(rb));
  }
  return quantile(std::move(stats), q);
}

double chi_square_pvalue(double statistic, double dof) {
  if (!(dof > 0.0)) throw ParameterError("chi_square_pvalue: dof must be positive");
  if (statistic <= 0.0) return 1.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), statistic));
}

PoissonFit poisson_chi_square(std::span<const long> counts, double rate) {
  if (counts.empty()) throw ParameterError("poisson_chi_square: no counts");
  if (!(rate > 0.0)) throw ParameterError("poisson_chi_square: rate must be positive");
  const double total = static_cast<double>(counts.size());
  const boost::math::poisson_distribution<double> law(rate);
  const long kmax = *std::max_element(counts.begin(), counts.end());
  std::vector<double> observed(static_cast<std::size_t>(kmax) + 1, 0.0);
  for (long c : counts) {
    if (c < 0) throw ParameterError("poisson_chi_square: negative count");
    observed[static_cast<std::size_t>(c)] += 1.0;
  }
  // Cells [lo, hi); the last cell is the whole upper tail.
  struct Cell {
    double obs = 0.0, expect = 0.0;
  };
  std::vector<Cell> cells;
  Cell cur;
  for (long k = 0; k <= kmax; ++k) {
    cur.obs += observed[static_cast<std::size_t>(k)];
    cur.expect += total * boost::math::pdf(law, static_cast<double>(k));
    if (cur.expect >= 5.0) {
      cells.push_back(cur);
      cur = Cell{};
    }
  }
  // upper tail beyond kmax
  cur.expect += total * boost::math::cdf(boost::math::complement(law, static_cast<double>(kmax)));
  if (cells.empty() || cur.expect >= 5.0) {
    cells.push_back(cur);
  } else {
    cells.back().obs += cur.obs;
    cells.back().expect += cur.expect;
  }
  PoissonFit fit;
  for (const auto& c : cells) fit.statistic += (c.obs - c.expect) * (c.obs - c.expect) / c.expect;
  fit.dof = std::max(1.0, static_cast<double>(cells.size()) - 1.0);
  fit.pvalue = chi_square_pvalue(fit.statistic, fit.dof);
  return fit;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 stream_engine(std::uint64_t root, std::uint64_t index) {
  return std::mt19937_64(splitmix64(root + 0x9e3779b97f4a7c15ULL * (index + 1)));
}

}  // namespace levyop
