#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "levyop/kernel_model.hpp"
#include "levyop/resolvent.hpp"
#include "levyop/spectral_grid.hpp"
#include "levyop/symbol_calculus.hpp"

namespace levyop {

struct ResolventSettings {
  /// lambda = multiple * R for the generator scan.
  std::vector<double> lambda_multiples{1, 2, 4, 8, 16, 32, 64};
  /// Empty means {0, alpha}.
  std::vector<double> alpha_primes;
  double s = 0.25;
  /// lambda = solve_multiple * R for the single resolvent solve.
  double solve_multiple = 8.0;
  NeumannOptions neumann{};
};

struct CauchySettings {
  double T = 1.0;
  int steps = 64;
  /// none | bump | mode | rough
  std::string forcing = "bump";
  /// zero | bump | mode
  std::string initial = "zero";
  double s = 0.25;
  double theta = 0.5;
  bool require_f0_zero = false;
};

struct SimulationSettings {
  double epsilon = 0.02;
  std::size_t paths = 20000;
  double T = 0.5;
  /// Fractions of T.
  std::vector<double> checkpoints{0.25, 0.5, 1.0};
  double drift_step = 1e-3;
  long max_jumps = 1'000'000;
  /// Starting points along the first axis (the other coordinate is 0).
  std::vector<double> probes{0.0};
  /// Width of the Gaussian test function, in units of the half-period.
  double sigma = 0.3;
  bool record_paths = false;
};

/// "max.metric = v" requires metric <= v, "min.metric = v" requires >= v.
struct CheckSpec {
  std::string metric;
  bool upper = true;
  double bound = 0.0;
};

struct ExperimentConfig {
  /// validate | symbol | resolvent | cauchy | simulate | verify-martingale |
  /// crosscheck | bench | none
  std::string kind = "none";
  /// Explicit stage list; when given it overrides the stages of `kind`.
  std::vector<std::string> pipeline;
  bool pipeline_given = false;
  std::filesystem::path out_dir = "levyop_out";
  std::uint64_t seed = 1;
  int threads = 0;
  bool plots = true;
  KernelSpec kernel{};
  double half_period = 1.0;
  int grid_points = 256;
  SymbolOptions symbol{};
  ResolventSettings resolvent{};
  CauchySettings cauchy{};
  SimulationSettings simulation{};
  std::vector<CheckSpec> checks;
  /// Raw text the config was parsed from (hashed into the manifest).
  std::string source_text;

  TorusGrid grid() const;
  /// Stages run by this config, in order.
  std::vector<std::string> stages() const;
  /// Checks every module precondition reachable from the stages; throws
  /// ConfigError naming the first violated one.
  void validate() const;
};

/// INI text with sections [experiment], [kernel], [grid], [symbol],
/// [resolvent], [cauchy], [simulation], [checks].  Throws ConfigError naming
/// the line or field.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Stage list of an experiment kind; throws ConfigError for unknown kinds.
std::vector<std::string> stages_for_kind(const std::string& kind);

std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

/// Ordered key = value text file.
class Manifest {
 public:
  void set(const std::string& key, const std::string& value);
  void add_file(const std::string& relative);
  const std::vector<std::string>& files() const { return files_; }
  void write(const std::filesystem::path& path) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::vector<std::string> files_;
};

std::vector<double> parse_number_list(const std::string& text);

}  // namespace levyop
