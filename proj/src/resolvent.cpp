#include "levyop/resolvent.hpp"

#include <cmath>
#include <exception>
#include <iomanip>
#include <sstream>

#include "levyop/errors.hpp"

namespace levyop {

DiscreteGenerator DiscreteGenerator::build(const KernelSpec& spec, const TorusGrid& grid, const SymbolOptions& opt) {
  spec.validate();
  if (spec.n != grid.dim()) throw ParameterError("kernel and grid dimensions differ");
  DiscreteGenerator g;
  g.spec = spec;
  g.grid = grid;
  g.p = compute_symbol(spec, grid, opt);
  if (spec.has_tail()) g.tail = tail_symbol_table(spec, grid, opt);
  g.sector = sector_and_ellipticity(g.p, spec.alpha);
  return g;
}

GridFunction DiscreteGenerator::apply(const GridFunction& f) const {
  GridFunction out = apply_xform(p, f);
  if (!tail.empty()) out += apply_multiplier(f, tail);
  return out;
}

ResolventOperator::ResolventOperator(std::shared_ptr<const DiscreteGenerator> gen, cplx lambda, NeumannOptions opt)
    : gen_(std::move(gen)), lambda_(lambda), opt_(opt) {
  if (!gen_) throw ParameterError("ResolventOperator: no generator");
  if (!(opt_.tol > 0.0)) throw ParameterError("ResolventOperator: tolerance must be positive");
  q_ = resolvent_symbol(gen_->p, lambda_, gen_->sector);
}

GridFunction ResolventOperator::remainder(const GridFunction& f) const {
  return remainder_operator_apply(gen_->p, q_, lambda_, f, gen_->tail);
}

ResolventSolve ResolventOperator::solve(const GridFunction& f) const {
  ResolventSolve out;
  const double f_norm = f.max_abs();
  out.u = GridFunction(f.grid(), Space::physical);
  out.residuals.push_back(f_norm > 0.0 ? 1.0 : 0.0);
  if (f_norm == 0.0) {
    out.converged = true;
    return out;
  }
  // x-independent symbols have R = 0: one parametrix application is exact.
  if (gen_->p.x_independent()) {
    out.u = apply_yform(q_, f);
    out.iterations = 1;
    out.residuals.push_back(0.0);
    out.converged = true;
    return out;
  }
  GridFunction r = f;
  GridFunction acc(f.grid(), Space::physical);
  int rising = 0;
  for (int k = 1; k <= opt_.max_iterations; ++k) {
    acc += r;
    r = remainder(r);
    const double rel = r.max_abs() / f_norm;
    const double prev = out.residuals.back();
    out.residuals.push_back(rel);
    out.iterations = k;
    rising = rel >= prev ? rising + 1 : 0;
    if (rising >= 3) {
      std::ostringstream os;
      os << "Neumann series does not contract at lambda = " << lambda_ << " (residual " << rel
         << " after " << k << " iterations); use a larger |lambda|";
      throw DivergenceError(os.str());
    }
    if (rel <= opt_.tol) {
      out.converged = true;
      break;
    }
  }
  if (!out.converged) {
    std::ostringstream os;
    os << "Neumann series exceeded " << opt_.max_iterations << " iterations at lambda = " << lambda_
       << " (residual " << out.residuals.back() << ")";
    throw DivergenceError(os.str());
  }
  out.u = apply_yform(q_, acc);
  return out;
}

double resolvent_defect(const KernelSpec& spec, cplx lambda, const GridFunction& u, const GridFunction& f,
                        const DirectOptions& opt) {
  GridFunction d = lambda * u;
  d -= apply_L_direct(spec, u, opt);
  d -= f;
  const double fn = f.max_abs();
  return fn > 0.0 ? d.max_abs() / fn : d.max_abs();
}

std::vector<GridFunction> probe_basket(const TorusGrid& grid, double s) {
  const double l = grid.half_period();
  const int n = grid.dim();
  const double nyquist = 0.5 * grid.points() / l;
  auto gaussian = [&](double c, double sigma) {
    return [=](const Point& x) {
      Point d = x;
      d[0] -= c;
      const double r = norm(d, n);
      return std::exp(-0.5 * r * r / (sigma * sigma));
    };
  };
  std::vector<std::function<double(const Point&)>> shapes;
  for (double sig : {0.2, 0.3, 0.45}) shapes.push_back(gaussian(0.0, sig * l));
  shapes.push_back([=](const Point& x) {
    double e = 0.0;
    for (int d = 0; d < n; ++d) e += std::cos(x[d] / l) - 1.0;
    return std::exp(0.75 * e);
  });
  for (double c : {-kPi / 3.0, kPi / 3.0}) shapes.push_back(gaussian(c * l, 0.3 * l));
  for (int k : {2, 3}) {
    auto g = gaussian(0.0, 0.4 * l);
    shapes.push_back([=](const Point& x) { return std::cos(k * x[0] / l) * g(x); });
  }
  for (int i = 0; i < 4; ++i) {
    const double w = 0.75 * nyquist / std::ldexp(1.0, i);
    auto g = gaussian(0.0, 0.3 * l);
    shapes.push_back([=](const Point& x) { return std::cos(w * x[0]) * g(x); });
  }
  const DyadicPartition part(grid);
  std::vector<GridFunction> out;
  for (const auto& sh : shapes) {
    GridFunction f = GridFunction::sample_real(grid, sh);
    f *= 1.0 / holder_zygmund_norm(f, s, part);
    out.push_back(std::move(f));
  }
  return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ParameterError("loglog_slope: need two or more pairs");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ParameterError("loglog_slope: non-positive sample");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

GeneratorReport generator_bound_scan(const std::shared_ptr<const DiscreteGenerator>& gen,
                                     const std::vector<cplx>& lambdas, const std::vector<GridFunction>& probes,
                                     const std::vector<double>& alpha_primes, double s, const NeumannOptions& opt) {
  if (lambdas.size() < 2) throw ParameterError("generator_bound_scan: need at least two lambdas");
  if (probes.empty()) throw ParameterError("generator_bound_scan: empty probe set");
  GeneratorReport rep;
  rep.lambdas = lambdas;
  rep.alpha_primes = alpha_primes;
  rep.s = s;
  rep.sector_angle = gen->sector.delta_prime;
  const double alpha = gen->spec.alpha;
  const DyadicPartition part(gen->grid);
  std::vector<double> f_norms;
  for (const auto& f : probes) f_norms.push_back(holder_zygmund_norm(f, s, part));

  const std::size_t L = lambdas.size();
  rep.norms.assign(alpha_primes.size(), std::vector<double>(L, 0.0));
  rep.sup_norms.assign(L, 0.0);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t l = 0; l < L; ++l) {
    try {
      const ResolventOperator res(gen, lambdas[l], opt);
      for (std::size_t i = 0; i < probes.size(); ++i) {
        const GridFunction u = res(probes[i]);
        rep.sup_norms[l] = std::max(rep.sup_norms[l], u.max_abs() / probes[i].max_abs());
        for (std::size_t a = 0; a < alpha_primes.size(); ++a)
          rep.norms[a][l] = std::max(rep.norms[a][l], holder_zygmund_norm(u, s + alpha_primes[a], part) / f_norms[i]);
      }
    } catch (...) {
#pragma omp critical(levyop_scan_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<double> mags;
  for (cplx lam : lambdas) mags.push_back(std::abs(lam));
  for (std::size_t a = 0; a < alpha_primes.size(); ++a) {
    rep.slopes.push_back(loglog_slope(mags, rep.norms[a]));
    rep.expected_slopes.push_back(-(alpha - alpha_primes[a]) / alpha);
  }
  for (std::size_t l = 0; l < L; ++l) rep.M_gen = std::max(rep.M_gen, mags[l] * rep.sup_norms[l]);
  return rep;
}

void write_csv(std::ostream& os, const GeneratorReport& r) {
  os << "re_lambda,im_lambda,abs_lambda,alpha_prime,norm,slope,expected_slope\n";
  os << std::setprecision(12);
  for (std::size_t a = 0; a < r.alpha_primes.size(); ++a)
    for (std::size_t l = 0; l < r.lambdas.size(); ++l)
      os << r.lambdas[l].real() << ',' << r.lambdas[l].imag() << ',' << std::abs(r.lambdas[l]) << ','
         << r.alpha_primes[a] << ',' << r.norms[a][l] << ',' << r.slopes[a] << ',' << r.expected_slopes[a] << '\n';
}

PositivityResult positivity_of_resolvent(const std::shared_ptr<const DiscreteGenerator>& gen, double lambda,
                                         const GridFunction& f, double tol_pos) {
  const double fn = f.max_abs();
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i].real() < 0.0 || std::abs(f[i].imag()) > 1e-14 * std::max(fn, 1.0)) {
      std::ostringstream os;
      os << "positivity_of_resolvent: f is not non-negative at grid index " << i << " (value " << f[i] << ")";
      throw PreconditionError(os.str());
    }
  }
  PositivityResult out;
  if (fn == 0.0) return out;
  const ResolventOperator res(gen, lambda);
  const GridFunction u = res(f);
  out.min_value = u.min_real();
  out.nonnegative = out.min_value >= -tol_pos * fn;
  return out;
}

}  // namespace levyop
