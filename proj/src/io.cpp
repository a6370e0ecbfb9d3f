#include "levyop/io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "levyop/errors.hpp"

namespace levyop {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"experiment", {"kind", "pipeline", "out", "seed", "threads", "plots"}},
      {"kernel",
       {"n", "alpha", "alpha_prime", "tau", "family", "coefficient", "a0", "a1", "holder", "terms", "skew", "tail",
        "c2", "c_lower", "C_upper"}},
      {"grid", {"half_period", "points"}},
      {"symbol", {"rel_tol"}},
      {"resolvent", {"lambda_multiples", "alpha_primes", "s", "solve_multiple", "neumann_tol", "max_iterations"}},
      {"cauchy", {"T", "steps", "forcing", "initial", "s", "theta", "require_f0_zero"}},
      {"simulation",
       {"epsilon", "paths", "T", "checkpoints", "drift_step", "max_jumps", "probes", "sigma", "record_paths"}},
      {"checks", {}},
  };
  return keys;
}

// Line of "key" inside [section] in the source text, or 0.
int locate(const std::string& text, const std::string& section, const std::string& key) {
  std::istringstream is(text);
  std::string line, current;
  int no = 0;
  while (std::getline(is, line)) {
    ++no;
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (line[first] == '[') {
      const auto close = line.find(']', first);
      current = line.substr(first + 1, close == std::string::npos ? std::string::npos : close - first - 1);
      continue;
    }
    if (current != section) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string k = line.substr(first, eq - first);
    k.erase(k.find_last_not_of(" \t") + 1);
    if (k == key) return no;
  }
  return 0;
}

class Reader {
 public:
  Reader(const pt::ptree& tree, const std::string& text) : tree_(tree), text_(text) {}

  [[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& why) const {
    std::ostringstream os;
    os << "config field " << section << '.' << key;
    if (const int line = locate(text_, section, key); line > 0) os << " (line " << line << ")";
    os << ": " << why;
    throw ConfigError(os.str());
  }

  const pt::ptree* section(const std::string& name) const {
    const auto it = tree_.find(name);
    return it == tree_.not_found() ? nullptr : &it->second;
  }

  std::string text(const std::string& sec, const std::string& key, const std::string& fallback) const {
    const pt::ptree* s = section(sec);
    if (!s) return fallback;
    const auto v = s->get_optional<std::string>(pt::ptree::path_type(key, '/'));
    if (!v) return fallback;
    std::string out = *v;
    const auto hash = out.find_first_of(";#");
    if (hash != std::string::npos) out.erase(hash);
    out.erase(0, out.find_first_not_of(" \t"));
    out.erase(out.find_last_not_of(" \t") + 1);
    return out;
  }

  bool has(const std::string& sec, const std::string& key) const {
    const pt::ptree* s = section(sec);
    return s && s->get_optional<std::string>(pt::ptree::path_type(key, '/'));
  }

  double number(const std::string& sec, const std::string& key, double fallback) const {
    if (!has(sec, key)) return fallback;
    const std::string v = text(sec, key, "");
    try {
      std::size_t used = 0;
      const double d = std::stod(v, &used);
      if (used != v.size()) fail(sec, key, "trailing characters in '" + v + "'");
      return d;
    } catch (const std::logic_error&) {
      fail(sec, key, "not a number: '" + v + "'");
    }
  }

  long integer(const std::string& sec, const std::string& key, long fallback) const {
    const double d = number(sec, key, static_cast<double>(fallback));
    if (d != std::floor(d)) fail(sec, key, "expected an integer");
    return static_cast<long>(d);
  }

  bool flag(const std::string& sec, const std::string& key, bool fallback) const {
    if (!has(sec, key)) return fallback;
    const std::string v = text(sec, key, "");
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    fail(sec, key, "expected true or false, got '" + v + "'");
  }

  std::vector<double> numbers(const std::string& sec, const std::string& key, std::vector<double> fallback) const {
    if (!has(sec, key)) return fallback;
    try {
      return parse_number_list(text(sec, key, ""));
    } catch (const Error& e) {
      fail(sec, key, e.what());
    }
  }

 private:
  const pt::ptree& tree_;
  const std::string& text_;
};

std::vector<std::string> split_words(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

const std::set<std::string>& known_stages() {
  static const std::set<std::string> s{"validate", "symbol",           "resolvent", "cauchy",
                                       "simulate", "verify-martingale", "mcpde",     "bench"};
  return s;
}

}  // namespace

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& w : split_words(text)) {
    std::size_t used = 0;
    double d = 0.0;
    try {
      d = std::stod(w, &used);
    } catch (const std::logic_error&) {
      throw ConfigError("not a number: '" + w + "'");
    }
    if (used != w.size()) throw ConfigError("not a number: '" + w + "'");
    out.push_back(d);
  }
  return out;
}

std::vector<std::string> stages_for_kind(const std::string& kind) {
  if (kind == "none" || kind.empty()) return {};
  if (kind == "crosscheck") return {"symbol", "resolvent", "cauchy", "simulate", "mcpde"};
  if (kind == "verify") return {"verify-martingale"};
  if (known_stages().count(kind)) return {kind};
  throw ConfigError("unknown experiment kind '" + kind + "'");
}

TorusGrid ExperimentConfig::grid() const { return TorusGrid(kernel.n, half_period, grid_points); }

std::vector<std::string> ExperimentConfig::stages() const {
  return pipeline_given ? pipeline : stages_for_kind(kind);
}

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream is(text);
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    std::ostringstream os;
    os << "config line " << e.line() << ": " << e.message();
    throw ConfigError(os.str());
  }
  const Reader r(tree, text);
  for (const auto& [name, sec] : tree) {
    const auto it = known_keys().find(name);
    if (it == known_keys().end()) {
      if (sec.empty()) r.fail("", name, "key outside any section");
      throw ConfigError("unknown config section [" + name + "]");
    }
    if (name == "checks") continue;
    for (const auto& [key, value] : sec)
      if (!it->second.count(key)) r.fail(name, key, "unknown key");
  }

  ExperimentConfig c;
  c.source_text = text;
  c.kind = r.text("experiment", "kind", "none");
  if (r.has("experiment", "pipeline")) {
    c.pipeline_given = true;
    c.pipeline = split_words(r.text("experiment", "pipeline", ""));
    for (const auto& s : c.pipeline)
      if (!known_stages().count(s)) r.fail("experiment", "pipeline", "unknown stage '" + s + "'");
  } else {
    try {
      (void)stages_for_kind(c.kind);
    } catch (const ConfigError& e) {
      r.fail("experiment", "kind", e.what());
    }
  }
  c.out_dir = r.text("experiment", "out", c.out_dir.string());
  {
    const long seed = r.integer("experiment", "seed", 1);
    if (seed < 0) r.fail("experiment", "seed", "must be non-negative");
    c.seed = static_cast<std::uint64_t>(seed);
  }
  c.threads = static_cast<int>(r.integer("experiment", "threads", 0));
  c.plots = r.flag("experiment", "plots", true);

  KernelSpec& k = c.kernel;
  k.n = static_cast<int>(r.integer("kernel", "n", 1));
  k.alpha = r.number("kernel", "alpha", 1.5);
  k.alpha_prime = r.number("kernel", "alpha_prime", 0.0);
  k.tau = r.number("kernel", "tau", 0.5);
  const std::string fam = r.text("kernel", "family", "stable");
  if (fam == "stable")
    k.k1_family = KernelSpec::PrincipalFamily::stable;
  else if (fam == "stable_fullspace")
    k.k1_family = KernelSpec::PrincipalFamily::stable_fullspace;
  else
    r.fail("kernel", "family", "expected stable or stable_fullspace");
  try {
    k.coeff.kind = coefficient_kind_from_string(r.text("kernel", "coefficient", "constant"));
  } catch (const Error& e) {
    r.fail("kernel", "coefficient", e.what());
  }
  k.coeff.a0 = r.number("kernel", "a0", 1.0);
  k.coeff.a1 = r.number("kernel", "a1", 0.0);
  k.coeff.holder = r.number("kernel", "holder", 0.7);
  k.coeff.terms = static_cast<int>(r.integer("kernel", "terms", 4));
  k.skew = r.number("kernel", "skew", 0.0);
  const std::string tail = r.text("kernel", "tail", "none");
  if (tail == "none")
    k.k2_family = KernelSpec::TailFamily::none;
  else if (tail == "exp_tail")
    k.k2_family = KernelSpec::TailFamily::exp_tail;
  else
    r.fail("kernel", "tail", "expected none or exp_tail");
  k.c2 = r.number("kernel", "c2", 0.0);
  k.c_lower = r.number("kernel", "c_lower", -1.0);
  k.C_upper = r.number("kernel", "C_upper", -1.0);

  c.half_period = r.number("grid", "half_period", 1.0);
  c.grid_points = static_cast<int>(r.integer("grid", "points", 256));
  c.symbol.rel_tol = r.number("symbol", "rel_tol", c.symbol.rel_tol);

  auto& rs = c.resolvent;
  rs.lambda_multiples = r.numbers("resolvent", "lambda_multiples", rs.lambda_multiples);
  rs.alpha_primes = r.numbers("resolvent", "alpha_primes", rs.alpha_primes);
  rs.s = r.number("resolvent", "s", rs.s);
  rs.solve_multiple = r.number("resolvent", "solve_multiple", rs.solve_multiple);
  rs.neumann.tol = r.number("resolvent", "neumann_tol", rs.neumann.tol);
  rs.neumann.max_iterations = static_cast<int>(r.integer("resolvent", "max_iterations", rs.neumann.max_iterations));

  auto& cs = c.cauchy;
  cs.T = r.number("cauchy", "T", cs.T);
  cs.steps = static_cast<int>(r.integer("cauchy", "steps", cs.steps));
  cs.forcing = r.text("cauchy", "forcing", cs.forcing);
  cs.initial = r.text("cauchy", "initial", cs.initial);
  cs.s = r.number("cauchy", "s", cs.s);
  cs.theta = r.number("cauchy", "theta", cs.theta);
  cs.require_f0_zero = r.flag("cauchy", "require_f0_zero", cs.require_f0_zero);

  auto& ss = c.simulation;
  ss.epsilon = r.number("simulation", "epsilon", ss.epsilon);
  {
    const long p = r.integer("simulation", "paths", static_cast<long>(ss.paths));
    if (p < 1) r.fail("simulation", "paths", "must be positive");
    ss.paths = static_cast<std::size_t>(p);
  }
  ss.T = r.number("simulation", "T", ss.T);
  ss.checkpoints = r.numbers("simulation", "checkpoints", ss.checkpoints);
  ss.drift_step = r.number("simulation", "drift_step", ss.drift_step);
  ss.max_jumps = r.integer("simulation", "max_jumps", ss.max_jumps);
  ss.probes = r.numbers("simulation", "probes", ss.probes);
  ss.sigma = r.number("simulation", "sigma", ss.sigma);
  ss.record_paths = r.flag("simulation", "record_paths", ss.record_paths);

  if (const pt::ptree* checks = r.section("checks")) {
    for (const auto& [key, value] : *checks) {
      CheckSpec chk;
      if (key.rfind("max.", 0) == 0) {
        chk.upper = true;
      } else if (key.rfind("min.", 0) == 0) {
        chk.upper = false;
      } else {
        r.fail("checks", key, "check names start with max. or min.");
      }
      chk.metric = key.substr(4);
      chk.bound = r.number("checks", key, 0.0);
      c.checks.push_back(chk);
    }
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_config(buf.str());
}

void ExperimentConfig::validate() const {
  const auto stage_list = stages();
  if (stage_list.empty()) return;
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  try {
    kernel.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("kernel: ") + e.what());
  }
  try {
    (void)grid();
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
  // The coefficient has period 2 pi; the torus must contain whole periods.
  if (!kernel.x_independent())
    need(half_period == std::floor(half_period), "grid: half_period must be an integer for an x-dependent coefficient");
  need(symbol.rel_tol > 0.0 && symbol.rel_tol < 1e-3, "symbol: rel_tol out of (0, 1e-3)");
  auto uses = [&](const std::string& s) { return std::find(stage_list.begin(), stage_list.end(), s) != stage_list.end(); };
  const bool sim = uses("simulate") || uses("verify-martingale") || uses("mcpde");
  if (uses("resolvent")) {
    need(resolvent.lambda_multiples.size() >= 2, "resolvent: lambda_multiples needs at least two entries");
    for (double m : resolvent.lambda_multiples) need(m >= 1.0, "resolvent: lambda multiples must be >= 1");
    need(resolvent.solve_multiple >= 1.0, "resolvent: solve_multiple must be >= 1");
    need(resolvent.s > 0.0, "resolvent: s must be positive");
    for (double a : resolvent.alpha_primes)
      need(a >= 0.0 && a <= kernel.alpha, "resolvent: alpha_primes must lie in [0, alpha]");
    need(resolvent.neumann.tol > 0.0 && resolvent.neumann.max_iterations >= 1, "resolvent: bad Neumann options");
  }
  if (uses("cauchy") || uses("mcpde")) {
    need(cauchy.T > 0.0 && cauchy.steps >= 1, "cauchy: T and steps must be positive");
    static const std::set<std::string> forcings{"none", "bump", "mode", "rough"};
    static const std::set<std::string> initials{"zero", "bump", "mode"};
    need(forcings.count(cauchy.forcing) > 0, "cauchy: forcing must be none, bump, mode or rough");
    need(initials.count(cauchy.initial) > 0, "cauchy: initial must be zero, bump or mode");
    need(cauchy.s > 0.0 && cauchy.theta > 0.0 && cauchy.theta < 1.0, "cauchy: need s > 0 and theta in (0,1)");
  }
  if (sim) {
    need(kernel.k1_family == KernelSpec::PrincipalFamily::stable, "simulation: needs the truncated stable family");
    need(simulation.epsilon > 0.0 && simulation.epsilon < 1.0, "simulation: epsilon out of (0,1)");
    need(simulation.T > 0.0, "simulation: T must be positive");
    need(!simulation.checkpoints.empty(), "simulation: no checkpoints");
    for (std::size_t i = 0; i < simulation.checkpoints.size(); ++i) {
      const double f = simulation.checkpoints[i];
      need(f >= 0.0 && f <= 1.0, "simulation: checkpoints are fractions of T in [0,1]");
      need(i == 0 || f > simulation.checkpoints[i - 1], "simulation: checkpoints must increase");
    }
    need(simulation.drift_step > 0.0, "simulation: drift_step must be positive");
    need(simulation.max_jumps >= 1, "simulation: max_jumps must be positive");
    need(!simulation.probes.empty(), "simulation: no probes");
    need(simulation.sigma > 0.0, "simulation: sigma must be positive");
  }
  if (uses("mcpde")) {
    const double steps = simulation.T / cauchy.T * cauchy.steps;
    need(std::abs(steps - std::round(steps)) < 1e-9 && std::round(steps) >= 1,
         "mcpde: simulation.T must be a whole number of cauchy steps (dt = cauchy.T / cauchy.steps)");
  }
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << v;
  return os.str();
}

void Manifest::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  entries_.emplace_back(key, value);
}

void Manifest::add_file(const std::string& relative) {
  if (std::find(files_.begin(), files_.end(), relative) == files_.end()) files_.push_back(relative);
}

void Manifest::write(const std::filesystem::path& path) const {
  std::ofstream os(path);
  if (!os) throw Error("cannot write manifest " + path.string());
  for (const auto& [k, v] : entries_) os << k << " = " << v << '\n';
  for (std::size_t i = 0; i < files_.size(); ++i) os << "file." << i << " = " << files_[i] << '\n';
}

}  // namespace levyop
