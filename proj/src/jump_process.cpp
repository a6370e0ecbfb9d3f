#include "levyop/jump_process.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <iomanip>
#include <limits>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "levyop/errors.hpp"

namespace levyop {

// ---------------------------------------------------------------------------
// Refined periodic interpolation

PeriodicInterpolant::PeriodicInterpolant(const GridFunction& f, int refine, int degree) : degree_(degree) {
  if (refine < 1 || degree < 1 || degree > 9) throw ParameterError("PeriodicInterpolant: bad refine or degree");
  const TorusGrid& g = f.grid();
  const int N = g.points(), n = g.dim();
  fine_ = TorusGrid(n, g.half_period(), N * refine);
  const int Nf = fine_.points();
  const GridFunction spec = f.space() == Space::frequency ? f : f.to_frequency();
  GridFunction padded(fine_, Space::frequency);
  const double gain = std::pow(static_cast<double>(refine), n);
  // Each axis maps k -> signed index; the Nyquist index is split evenly
  // between +N/2 and -N/2 so that real data stays real.
  auto targets = [&](int k) {
    std::vector<std::pair<int, double>> t;
    const int s = g.signed_index(k);
    if (k == N / 2) {
      t.emplace_back(N / 2, 0.5);
      t.emplace_back(Nf - N / 2, 0.5);
    } else {
      t.emplace_back(s >= 0 ? s : Nf + s, 1.0);
    }
    return t;
  };
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const auto mi = g.multi_index(idx);
    for (const auto& [k0, w0] : targets(mi[0])) {
      if (n == 1) {
        padded[static_cast<std::size_t>(k0)] += gain * w0 * spec[idx];
        continue;
      }
      for (const auto& [k1, w1] : targets(mi[1])) padded[fine_.flat(k0, k1)] += gain * w0 * w1 * spec[idx];
    }
  }
  const GridFunction phys = padded.to_physical();
  values_.resize(phys.size());
  for (std::size_t i = 0; i < phys.size(); ++i) values_[i] = phys[i].real();
}

double PeriodicInterpolant::operator()(const Point& x) const {
  if (values_.empty()) throw PreconditionError("PeriodicInterpolant: empty interpolant");
  const int Nf = fine_.points(), n = fine_.dim();
  const int m = degree_ + 1;
  const double h = fine_.spacing();
  const double x0 = fine_.coord(0);
  std::array<std::array<double, 10>, 2> w{};
  std::array<int, 2> base{};
  for (int d = 0; d < n; ++d) {
    const double u = (x[d] - x0) / h;
    const double fl = std::floor(u);
    const double frac = u - fl;
    const int lo = static_cast<int>(fl) - (m - 1) / 2;
    base[d] = lo;
    // nodes at offsets j - (m-1)/2 relative to floor(u), evaluate at frac
    for (int j = 0; j < m; ++j) {
      const double xj = j - (m - 1) / 2;
      double l = 1.0;
      for (int i = 0; i < m; ++i) {
        if (i == j) continue;
        const double xi = i - (m - 1) / 2;
        l *= (frac - xi) / (xj - xi);
      }
      w[d][j] = l;
    }
  }
  auto wrap = [Nf](int i) {
    i %= Nf;
    return i < 0 ? i + Nf : i;
  };
  double acc = 0.0;
  if (n == 1) {
    for (int j = 0; j < m; ++j) acc += w[0][j] * values_[static_cast<std::size_t>(wrap(base[0] + j))];
    return acc;
  }
  for (int j = 0; j < m; ++j) {
    const int r = wrap(base[0] + j);
    double row = 0.0;
    for (int i = 0; i < m; ++i) row += w[1][i] * values_[fine_.flat(r, wrap(base[1] + i))];
    acc += w[0][j] * row;
  }
  return acc;
}

PathIntegrand generator_integrand(const KernelSpec& spec, const GridFunction& phi, const DirectOptions& opt) {
  spec.validate();
  KernelSpec unit = spec;
  unit.coeff = Coefficient{};
  unit.k2_family = KernelSpec::TailFamily::none;
  unit.c2 = 0.0;
  auto principal = std::make_shared<const PeriodicInterpolant>(apply_L_direct(unit, phi, opt));
  std::shared_ptr<const PeriodicInterpolant> tail;
  if (spec.has_tail()) {
    KernelSpec only_tail = spec;
    only_tail.coeff = Coefficient{};
    const GridFunction t = apply_multiplier(phi, tail_symbol_table(only_tail, phi.grid()));
    tail = std::make_shared<const PeriodicInterpolant>(t);
  }
  const Coefficient a = spec.coeff;
  const int n = spec.n;
  return [principal, tail, a, n](const Point& x) {
    const double v = a(x, n) * (*principal)(x);
    return tail ? v + (*tail)(x) : v;
  };
}

// ---------------------------------------------------------------------------
// Scheme constants

namespace {

constexpr double kEnvelopeSlack = 1e-12;

double omega_sphere(int n) { return n == 1 ? 2.0 : 2.0 * kPi; }

// int_1^2 r^{-p} chi(r) dr
double ramp_moment(double p) {
  return boost::math::quadrature::gauss<double, 30>::integrate(
      [p](double r) { return std::pow(r, -p) * unit_ramp(r); }, 1.0, 2.0);
}

// int_lo^1 r^{-p} dr
double power_moment(double p, double lo) {
  if (std::abs(p - 1.0) < 1e-14) return -std::log(lo);
  return (1.0 - std::pow(lo, 1.0 - p)) / (1.0 - p);
}

// Per-spec constants of the simulation.
struct SchemeConstants {
  int n = 1;
  double alpha = 1.5;
  double eps = 0.02;
  double A = 1.0;
  double eps_pow = 0.0;    // eps^{-alpha} - 2^{-alpha}
  double rate1 = 0.0;      // envelope intensity of the k1 stream
  double rate2 = 0.0;      // envelope intensity of the k2 stream
  double k2_bound = 1.0;   // bound of the k2 radial acceptance weight
  double drift_coef = 0.0; // b(x) = a(x) * drift_coef * e_1
  double drift_step = 1e-3;
  long max_jumps = 0;
  bool record = false;
};

SchemeConstants scheme_constants(const KernelSpec& spec, const SimScheme& s) {
  if (!(s.epsilon > 0.0 && s.epsilon < 1.0)) throw ParameterError("SimScheme: epsilon must lie in (0,1)");
  if (!(s.drift_step > 0.0)) throw ParameterError("SimScheme: drift_step must be positive");
  if (s.max_jumps < 1) throw ParameterError("SimScheme: max_jumps must be positive");
  if (spec.k1_family != KernelSpec::PrincipalFamily::stable)
    throw ParameterError("simulation needs the truncated stable-like k1 family");
  SchemeConstants c;
  c.n = spec.n;
  c.alpha = spec.alpha;
  c.eps = s.epsilon;
  c.A = s.envelope_scale;
  c.eps_pow = std::pow(c.eps, -c.alpha) - std::pow(2.0, -c.alpha);
  c.rate1 = c.A * omega_sphere(c.n) * c.eps_pow / c.alpha;
  if (spec.has_tail()) {
    if (spec.c2 < 0.0) throw ParameterError("simulation needs c2 >= 0");
    c.k2_bound = c.n == 1 ? 1.0 : 4.0 / 27.0;
    c.rate2 = spec.c2 * omega_sphere(c.n) * c.k2_bound;
  }
  // omega' = int over the sphere of theta_1^2
  const double omega_prime = c.n == 1 ? 2.0 : kPi;
  if (spec.skew != 0.0) {
    if (s.compensate) {
      const double I = power_moment(c.alpha, c.eps) + ramp_moment(c.alpha);
      c.drift_coef = -spec.skew * omega_prime * I;
    } else if (s.small_jump_drift && c.alpha < 1.0) {
      c.drift_coef = spec.skew * omega_prime * std::pow(c.eps, 1.0 - c.alpha) / (1.0 - c.alpha);
    }
  }
  c.drift_step = s.drift_step;
  c.max_jumps = s.max_jumps;
  c.record = s.record_paths;
  return c;
}

std::string point_text(const Point& p, int n) {
  std::ostringstream os;
  os << std::setprecision(6) << '(' << p[0];
  if (n == 2) os << ", " << p[1];
  os << ')';
  return os.str();
}

struct PathOutcome {
  Point initial{};
  std::vector<Point> states;
  std::vector<double> integrals;  // [integrand][checkpoint]
  long jumps = 0;
  long prop1 = 0, acc1 = 0, prop2 = 0, acc2 = 0;
  bool excluded = false;
  CadlagPath path;
};

class PathSimulator {
 public:
  PathSimulator(const KernelSpec& spec, const SchemeConstants& c, const InitialLaw& init, const SimRequest& req)
      : spec_(spec), c_(c), init_(init), req_(req) {}

  PathOutcome run(std::size_t index) const {
    auto eng = stream_engine(req_.seed, index);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int n = c_.n;
    const std::size_t C = req_.checkpoints.size(), I = req_.integrands.size();
    PathOutcome out;
    out.states.resize(C);
    out.integrals.assign(I * C, 0.0);
    Point x = init_.draw(index, n, eng);
    out.initial = x;
    if (c_.record) {
      out.path.n = n;
      out.path.start = x;
    }
    std::vector<double> acc(I, 0.0);
    std::vector<double> g_now(I);
    auto eval_all = [&](const Point& p, std::vector<double>& g) {
      for (std::size_t i = 0; i < I; ++i) g[i] = req_.integrands[i](p);
    };
    eval_all(x, g_now);

    const double rate = c_.rate1 + c_.rate2;
    std::exponential_distribution<double> wait(rate > 0.0 ? rate : 1.0);
    double t = 0.0;
    double next_prop = rate > 0.0 ? wait(eng) : std::numeric_limits<double>::infinity();
    std::size_t ci = 0;
    const bool drifting = c_.drift_coef != 0.0;

    auto record_checkpoints = [&] {
      while (ci < C && req_.checkpoints[ci] <= t) {
        out.states[ci] = x;
        for (std::size_t i = 0; i < I; ++i) out.integrals[i * C + ci] = acc[i];
        ++ci;
      }
    };
    record_checkpoints();

    while (ci < C) {
      const double t_next = std::min(next_prop, req_.checkpoints[ci]);
      // advance the flow from t to t_next
      if (!drifting) {
        for (std::size_t i = 0; i < I; ++i) acc[i] += g_now[i] * (t_next - t);
      } else {
        double tau = t;
        while (tau < t_next) {
          const double h = std::min(c_.drift_step, t_next - tau);
          x[0] += h * spec_.coeff(x, n) * c_.drift_coef;
          std::vector<double> g_new(I);
          eval_all(x, g_new);
          for (std::size_t i = 0; i < I; ++i) acc[i] += 0.5 * h * (g_now[i] + g_new[i]);
          g_now.swap(g_new);
          tau += h;
        }
      }
      t = t_next;
      record_checkpoints();
      if (t < next_prop) continue;
      // proposal
      Point y{0.0, 0.0};
      bool accept = false;
      if (unif(eng) * rate < c_.rate1) {
        ++out.prop1;
        const double u = unif(eng);
        const double r = std::pow(std::pow(c_.eps, -c_.alpha) - u * c_.eps_pow, -1.0 / c_.alpha);
        y = direction(r, eng, unif);
        const double ratio = spec_.coeff(x, n) * skew_factor(spec_, y) * unit_ramp(r) / c_.A;
        if (ratio > 1.0 + kEnvelopeSlack) {
          std::ostringstream os;
          os << "envelope does not dominate the kernel at x = " << point_text(x, n) << ", y = " << point_text(y, n)
             << " (ratio " << ratio << ")";
          throw ComputationError(os.str());
        }
        accept = unif(eng) < ratio;
        if (accept) ++out.acc1;
      } else {
        ++out.prop2;
        std::exponential_distribution<double> radial(1.0);
        const double r = radial(eng);
        y = direction(r, eng, unif);
        const double weight = n == 1 ? 1.0 / ((1.0 + r) * (1.0 + r)) : r / std::pow(1.0 + r, 3) / c_.k2_bound;
        accept = unif(eng) < weight;
        if (accept) ++out.acc2;
      }
      if (accept) {
        const Point left = x;
        x[0] += y[0];
        x[1] += y[1];
        ++out.jumps;
        if (c_.record) {
          out.path.jump_times.push_back(t);
          out.path.left_limits.push_back(left);
          out.path.values.push_back(x);
        }
        if (out.jumps > c_.max_jumps) {
          out.excluded = true;
          return out;
        }
        eval_all(x, g_now);
        // a jump exactly at a checkpoint time belongs to the state at that time
        if (ci > 0 && req_.checkpoints[ci - 1] == t) {
          out.states[ci - 1] = x;
        }
      }
      next_prop += wait(eng);
    }
    return out;
  }

 private:
  Point direction(double r, std::mt19937_64& eng, std::uniform_real_distribution<double>& unif) const {
    if (c_.n == 1) return {unif(eng) < 0.5 ? -r : r, 0.0};
    const double th = 2.0 * kPi * unif(eng);
    return {r * std::cos(th), r * std::sin(th)};
  }

  const KernelSpec& spec_;
  const SchemeConstants& c_;
  const InitialLaw& init_;
  const SimRequest& req_;
};

void validate_request(const SimRequest& req) {
  if (!(req.T > 0.0)) throw ParameterError("simulate_paths: T must be positive");
  if (req.n_paths < 1) throw ParameterError("simulate_paths: need at least one path");
  if (req.checkpoints.empty()) throw ParameterError("simulate_paths: no checkpoints");
  for (std::size_t i = 0; i < req.checkpoints.size(); ++i) {
    const double c = req.checkpoints[i];
    if (!(c >= 0.0 && c <= req.T)) throw ParameterError("simulate_paths: checkpoint outside [0, T]");
    if (i > 0 && !(c > req.checkpoints[i - 1])) throw ParameterError("simulate_paths: checkpoints must increase");
  }
}

PathEnsemble assemble(const KernelSpec& spec, const InitialLaw& init, const SimScheme& scheme,
                      const SchemeConstants& c, const SimRequest& req, std::vector<PathOutcome>& outs) {
  PathEnsemble ens;
  ens.spec = spec;
  ens.scheme = scheme;
  ens.initial_tag = init.tag;
  ens.T = req.T;
  ens.seed = req.seed;
  ens.checkpoints = req.checkpoints;
  ens.requested = req.n_paths;
  ens.integrand_count = req.integrands.size();
  ens.rate_k1 = c.rate1;
  ens.rate_k2 = c.rate2;
  const std::size_t C = req.checkpoints.size();
  for (std::size_t p = 0; p < outs.size(); ++p) {
    auto& o = outs[p];
    ens.proposals_k1 += o.prop1;
    ens.accepted_k1 += o.acc1;
    ens.proposals_k2 += o.prop2;
    ens.accepted_k2 += o.acc2;
    if (o.excluded) {
      ++ens.excluded;
      continue;
    }
    ens.path_index.push_back(p);
    ens.initial.push_back(o.initial);
    ens.states.insert(ens.states.end(), o.states.begin(), o.states.end());
    ens.jumps.push_back(o.jumps);
    if (c.record) ens.paths.push_back(std::move(o.path));
  }
  const std::size_t P = ens.size(), I = ens.integrand_count;
  ens.integrals.assign(I * P * C, 0.0);
  for (std::size_t p = 0; p < P; ++p) {
    const auto& o = outs[ens.path_index[p]];
    for (std::size_t i = 0; i < I; ++i)
      for (std::size_t k = 0; k < C; ++k) ens.integrals[(i * P + p) * C + k] = o.integrals[i * C + k];
  }
  return ens;
}

PathEnsemble simulate(const KernelSpec& spec, const InitialLaw& init, const SimScheme& scheme_in,
                      const SimRequest& req, bool parallel) {
  spec.validate();
  validate_request(req);
  const SimScheme scheme = scheme_in.resolved(spec);
  const SchemeConstants c = scheme_constants(spec, scheme);
  const PathSimulator sim(spec, c, init, req);
  std::vector<PathOutcome> outs(req.n_paths);
  std::exception_ptr failure;
  const long P = static_cast<long>(req.n_paths);
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 64)
    for (long p = 0; p < P; ++p) {
      try {
        outs[static_cast<std::size_t>(p)] = sim.run(static_cast<std::size_t>(p));
      } catch (...) {
#pragma omp critical(levyop_sim_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  } else {
    for (long p = 0; p < P; ++p) outs[static_cast<std::size_t>(p)] = sim.run(static_cast<std::size_t>(p));
  }
  return assemble(spec, init, scheme, c, req, outs);
}

}  // namespace

SimScheme SimScheme::resolved(const KernelSpec& spec) const {
  SimScheme s = *this;
  s.compensate = spec.compensated();
  const double need = principal_envelope_scale(spec);
  if (s.envelope_scale <= 0.0) s.envelope_scale = need;
  return s;
}

InitialLaw InitialLaw::point_mass(const Point& x) {
  InitialLaw law;
  law.point = x;
  std::ostringstream os;
  os << std::setprecision(17) << "point:" << x[0] << ',' << x[1];
  law.tag = os.str();
  return law;
}

InitialLaw InitialLaw::probe_set(std::vector<Point> probes) {
  if (probes.empty()) throw ParameterError("InitialLaw: empty probe set");
  InitialLaw law;
  std::ostringstream os;
  os << std::setprecision(17) << "probes";
  for (const auto& p : probes) os << ':' << p[0] << ',' << p[1];
  law.tag = os.str();
  law.probes = std::move(probes);
  return law;
}

InitialLaw InitialLaw::product(std::vector<std::function<double(std::mt19937_64&)>> marginals, std::string tag) {
  if (marginals.empty()) throw ParameterError("InitialLaw: no marginals");
  InitialLaw law;
  law.marginals = std::move(marginals);
  law.tag = "product:" + tag;
  return law;
}

Point InitialLaw::draw(std::size_t path, int n, std::mt19937_64& eng) const {
  if (!marginals.empty()) {
    if (static_cast<int>(marginals.size()) != n) throw ParameterError("InitialLaw: marginal count differs from n");
    Point p{0.0, 0.0};
    for (int d = 0; d < n; ++d) p[d] = marginals[d](eng);
    return p;
  }
  if (!probes.empty()) return probes[path % probes.size()];
  return point;
}

std::size_t PathEnsemble::checkpoint_index(double t) const {
  for (std::size_t c = 0; c < checkpoints.size(); ++c)
    if (std::abs(checkpoints[c] - t) <= 1e-12 * std::max(1.0, T)) return c;
  std::ostringstream os;
  os << "t = " << t << " is not a checkpoint of the ensemble";
  throw ParameterError(os.str());
}

PathEnsemble simulate_paths(const KernelSpec& spec, const InitialLaw& init, const SimScheme& scheme,
                            const SimRequest& req) {
  return simulate(spec, init, scheme, req, true);
}

PathEnsemble simulate_paths_serial(const KernelSpec& spec, const InitialLaw& init, const SimScheme& scheme,
                                   const SimRequest& req) {
  return simulate(spec, init, scheme, req, false);
}

Point scheme_drift(const KernelSpec& spec, const SimScheme& scheme, const Point& x) {
  const SchemeConstants c = scheme_constants(spec, scheme.resolved(spec));
  return {spec.coeff(x, spec.n) * c.drift_coef, 0.0};
}

double truncated_intensity(const KernelSpec& spec, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ParameterError("truncated_intensity: epsilon must lie in (0,1)");
  const double radial = power_moment(1.0 + spec.alpha, epsilon) + ramp_moment(1.0 + spec.alpha);
  return spec.coeff.a0 * omega_sphere(spec.n) * radial;
}

void write_summary_csv(std::ostream& os, const PathEnsemble& ens) {
  const int n = ens.spec.n;
  const std::size_t C = ens.checkpoints.size();
  os << "path,jumps";
  for (int d = 0; d < n; ++d) os << ",x0_" << d;
  for (int d = 0; d < n; ++d) os << ",xT_" << d;
  os << '\n' << std::setprecision(17);
  for (std::size_t p = 0; p < ens.size(); ++p) {
    os << ens.path_index[p] << ',' << ens.jumps[p];
    for (int d = 0; d < n; ++d) os << ',' << ens.initial[p][d];
    for (int d = 0; d < n; ++d) os << ',' << ens.state(p, C - 1)[d];
    os << '\n';
  }
}

void write_jump_events(std::ostream& os, const PathEnsemble& ens) {
  if (ens.paths.empty() && ens.size() > 0)
    throw PreconditionError("write_jump_events: ensemble was simulated without record_paths");
  const int n = ens.spec.n;
  os << std::setprecision(17);
  for (std::size_t p = 0; p < ens.paths.size(); ++p) {
    const auto& w = ens.paths[p];
    for (std::size_t j = 0; j < w.jump_times.size(); ++j) {
      os << ens.path_index[p] << ' ' << w.jump_times[j];
      for (int d = 0; d < n; ++d) os << ' ' << w.left_limits[j][d];
      for (int d = 0; d < n; ++d) os << ' ' << w.values[j][d];
      os << '\n';
    }
  }
}

// ---------------------------------------------------------------------------
// Martingale residual

MartingaleReport martingale_residual(const PathEnsemble& ens, const std::function<double(const Point&)>& phi,
                                     std::size_t generator_integrand, const MartingaleOptions& opt) {
  if (generator_integrand >= ens.integrand_count)
    throw ParameterError("martingale_residual: no such integrand in the ensemble");
  const std::size_t P = ens.size(), C = ens.checkpoints.size();
  if (P < 2) throw ParameterError("martingale_residual: need at least two paths");
  MartingaleReport rep;
  rep.checkpoints = ens.checkpoints;
  rep.threshold = opt.threshold;
  rep.scale = opt.scale;
  // M[c * P + p]
  std::vector<double> M(C * P);
  std::vector<double> phi0(P);
#pragma omp parallel for schedule(static)
  for (long lp = 0; lp < static_cast<long>(P); ++lp) {
    const std::size_t p = static_cast<std::size_t>(lp);
    phi0[p] = phi(ens.initial[p]);
    for (std::size_t c = 0; c < C; ++c)
      M[c * P + p] = phi(ens.state(p, c)) - phi0[p] - opt.scale * ens.integral(generator_integrand, p, c);
  }
  for (std::size_t c = 0; c < C; ++c) {
    rep.mean_M.push_back(mean_and_se(std::span<const double>(M.data() + c * P, P)));
    rep.max_z = std::max(rep.max_z, rep.mean_M.back().z());
  }
  if (opt.target_se > 0.0 && rep.mean_M.back().se > opt.target_se) {
    const double ratio = rep.mean_M.back().se / opt.target_se;
    const long need = static_cast<long>(std::ceil(static_cast<double>(P) * ratio * ratio));
    std::ostringstream os;
    os << "martingale_residual: standard error " << rep.mean_M.back().se << " exceeds the target " << opt.target_se
       << "; about " << need << " paths are needed";
    throw AdvisoryError(os.str(), need);
  }
  std::vector<double> prod(P);
  for (std::size_t s = 0; s + 1 < C; ++s) {
    if (ens.checkpoints[s] == 0.0) continue;  // g vanishes at time 0
    for (std::size_t t = s + 1; t < C; ++t) {
      for (int kind = 0; kind < 2; ++kind) {
        for (std::size_t p = 0; p < P; ++p) {
          const double dx = ens.state(p, s)[0] - ens.initial[p][0];
          const double g = kind == 0 ? (dx > 0.0 ? 1.0 : 0.0) : dx;
          prod[p] = (M[t * P + p] - M[s * P + p]) * g;
        }
        MartingaleStat st;
        st.label = kind == 0 ? "indicator" : "coordinate";
        st.s = ens.checkpoints[s];
        st.t = ens.checkpoints[t];
        st.estimate = mean_and_se(prod);
        st.passed = st.estimate.z() <= opt.threshold;
        rep.max_z = std::max(rep.max_z, st.estimate.z());
        rep.orthogonality.push_back(st);
      }
    }
  }
  rep.passed = rep.max_z <= opt.threshold;
  return rep;
}

void record_scheme_bias(MartingaleReport& a, const MartingaleReport& b) {
  if (a.mean_M.empty() || b.mean_M.empty()) throw ParameterError("record_scheme_bias: empty report");
  a.scheme_bias = std::abs(a.mean_M.back().mean - b.mean_M.back().mean);
}

void write_csv(std::ostream& os, const MartingaleReport& r) {
  os << "kind,s,t,estimate,se,z,passed\n" << std::setprecision(12);
  for (std::size_t c = 0; c < r.checkpoints.size(); ++c)
    os << "mean_M,0," << r.checkpoints[c] << ',' << r.mean_M[c].mean << ',' << r.mean_M[c].se << ','
       << r.mean_M[c].z() << ',' << (r.mean_M[c].z() <= r.threshold) << '\n';
  for (const auto& st : r.orthogonality)
    os << st.label << ',' << st.s << ',' << st.t << ',' << st.estimate.mean << ',' << st.estimate.se << ','
       << st.estimate.z() << ',' << st.passed << '\n';
}

// ---------------------------------------------------------------------------
// Law comparison

namespace {

bool same_kernel(const KernelSpec& a, const KernelSpec& b) {
  return a.n == b.n && a.alpha == b.alpha && a.k1_family == b.k1_family && a.coeff.kind == b.coeff.kind &&
         a.coeff.a0 == b.coeff.a0 && a.coeff.a1 == b.coeff.a1 && a.coeff.holder == b.coeff.holder &&
         a.coeff.terms == b.coeff.terms && a.skew == b.skew && a.k2_family == b.k2_family && a.c2 == b.c2;
}

// Wave vectors of the smoothed-moment statistic in two dimensions.
const std::vector<Point>& moment_frequencies() {
  static const std::vector<Point> k{{0.5, 0.0}, {0.0, 0.5}, {0.5, 0.5}, {0.5, -0.5}, {1.0, 0.0}, {0.0, 1.0}};
  return k;
}

double moment_distance(std::span<const Point> a, std::span<const Point> b) {
  double d = 0.0;
  for (const auto& k : moment_frequencies()) {
    cplx ma{}, mb{};
    for (const auto& x : a) ma += std::polar(1.0, k[0] * x[0] + k[1] * x[1]);
    for (const auto& x : b) mb += std::polar(1.0, k[0] * x[0] + k[1] * x[1]);
    d = std::max(d, std::abs(ma / static_cast<double>(a.size()) - mb / static_cast<double>(b.size())));
  }
  return d;
}

struct LawSamples {
  std::vector<Point> a, b;
};

LawSamples law_samples(const PathEnsemble& a, const PathEnsemble& b, double t) {
  if (!same_kernel(a.spec, b.spec)) throw ParameterError("one_dim_law_compare: ensembles use different kernels");
  if (a.initial_tag != b.initial_tag) throw ParameterError("one_dim_law_compare: initial laws differ");
  if (a.T != b.T) throw ParameterError("one_dim_law_compare: horizons differ");
  const std::size_t ca = a.checkpoint_index(t), cb = b.checkpoint_index(t);
  LawSamples s;
  for (std::size_t p = 0; p < a.size(); ++p) s.a.push_back(a.state(p, ca));
  for (std::size_t p = 0; p < b.size(); ++p) s.b.push_back(b.state(p, cb));
  if (s.a.empty() || s.b.empty()) throw ParameterError("one_dim_law_compare: empty ensemble");
  return s;
}

double law_distance(const LawSamples& s, int n) {
  if (n == 1) {
    std::vector<double> xa, xb;
    for (const auto& p : s.a) xa.push_back(p[0]);
    for (const auto& p : s.b) xb.push_back(p[0]);
    return ks_distance(std::move(xa), std::move(xb));
  }
  return moment_distance(s.a, s.b);
}

std::vector<double> null_distances(const LawSamples& s, int n, int replicates, std::uint64_t seed) {
  if (replicates < 10) throw ParameterError("law comparison: need at least 10 bootstrap replicates");
  std::vector<Point> pooled = s.a;
  pooled.insert(pooled.end(), s.b.begin(), s.b.end());
  std::vector<double> stats(static_cast<std::size_t>(replicates));
#pragma omp parallel for schedule(static)
  for (int r = 0; r < replicates; ++r) {
    auto eng = stream_engine(seed, static_cast<std::uint64_t>(r));
    std::uniform_int_distribution<std::size_t> pick(0, pooled.size() - 1);
    LawSamples boot;
    boot.a.resize(s.a.size());
    boot.b.resize(s.b.size());
    for (auto& x : boot.a) x = pooled[pick(eng)];
    for (auto& x : boot.b) x = pooled[pick(eng)];
    stats[static_cast<std::size_t>(r)] = law_distance(boot, n);
  }
  return stats;
}

}  // namespace

LawComparison one_dim_law_compare(const PathEnsemble& a, const PathEnsemble& b, double t,
                                  const LawCompareOptions& opt) {
  const LawSamples s = law_samples(a, b, t);
  const int n = a.spec.n;
  LawComparison out;
  out.quantile_level = opt.quantile_level;
  out.bias_allowance = opt.bias_allowance;
  out.distance = law_distance(s, n);
  out.null_quantile = quantile(null_distances(s, n, opt.replicates, opt.seed), opt.quantile_level);
  out.passed = out.distance <= out.null_quantile + out.bias_allowance;
  return out;
}

double law_bias_allowance(const PathEnsemble& coarse, const PathEnsemble& fine, double eps_a, double t,
                          const LawCompareOptions& opt) {
  const LawSamples s = law_samples(coarse, fine, t);
  const int n = coarse.spec.n;
  const double d = law_distance(s, n);
  const double median = quantile(null_distances(s, n, opt.replicates, opt.seed), 0.5);
  const double p = 2.0 - coarse.spec.alpha;
  const double ec = coarse.scheme.epsilon, eb = fine.scheme.epsilon;
  if (!(ec > eps_a && eps_a > eb)) throw ParameterError("law_bias_allowance: need eps_coarse > eps_a > eps_fine");
  const double factor = (std::pow(eps_a, p) - std::pow(eb, p)) / (std::pow(ec, p) - std::pow(eb, p));
  return factor * std::max(0.0, d - median);
}

// ---------------------------------------------------------------------------
// Monte Carlo against the Cauchy solver

McPdeTable mc_vs_pde(const PathEnsemble& ens, const GridFunction& psi, double t, const Trajectory& pde,
                     double bias_allowance) {
  const std::size_t c = ens.checkpoint_index(t);
  std::size_t m = pde.times.size();
  for (std::size_t i = 0; i < pde.times.size(); ++i)
    if (std::abs(pde.times[i] - t) <= 1e-9 * std::max(1.0, t)) m = i;
  if (m == pde.times.size()) throw ParameterError("mc_vs_pde: t is not a time slice of the Cauchy trajectory");
  if (!(pde.states[m].grid() == psi.grid())) throw ParameterError("mc_vs_pde: psi and trajectory grids differ");
  const PeriodicInterpolant psi_eval(psi);
  std::map<std::pair<double, double>, std::vector<double>> groups;
  for (std::size_t p = 0; p < ens.size(); ++p)
    groups[{ens.initial[p][0], ens.initial[p][1]}].push_back(psi_eval(ens.state(p, c)));
  McPdeTable table;
  table.t = t;
  table.bias_allowance = bias_allowance;
  table.passed = true;
  for (const auto& [key, vals] : groups) {
    ProbeError row;
    row.x = {key.first, key.second};
    row.mc = mean_and_se(vals);
    row.pde = pde.states[m].interpolate(row.x).real();
    row.error = std::abs(row.mc.mean - row.pde);
    row.tolerance = 3.0 * row.mc.se + bias_allowance;
    table.max_error = std::max(table.max_error, row.error);
    table.max_se = std::max(table.max_se, row.mc.se);
    table.passed = table.passed && row.error <= row.tolerance;
    table.rows.push_back(row);
  }
  return table;
}

void write_csv(std::ostream& os, const McPdeTable& t) {
  os << "x0,x1,t,mc_mean,mc_se,pde,error,tolerance\n" << std::setprecision(12);
  for (const auto& r : t.rows)
    os << r.x[0] << ',' << r.x[1] << ',' << t.t << ',' << r.mc.mean << ',' << r.mc.se << ',' << r.pde << ','
       << r.error << ',' << r.tolerance << '\n';
}

}  // namespace levyop
