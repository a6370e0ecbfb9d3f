#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include "doctest.h"
#include "levyop/errors.hpp"
#include "levyop/experiment.hpp"

using namespace levyop;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

ExperimentConfig small_crosscheck(const fs::path& out) {
  ExperimentConfig cfg = parse_config(
      "[experiment]\nkind = crosscheck\nseed = 5\n"
      "[kernel]\nalpha = 1.5\n"
      "[grid]\nhalf_period = 1\npoints = 64\n"
      "[cauchy]\nT = 0.25\nsteps = 32\ninitial = bump\n"
      "[simulation]\nepsilon = 0.05\npaths = 4000\nT = 0.25\ncheckpoints = 1.0\nprobes = 0, 1\n"
      "[checks]\nmax.resolvent.iterations = 15\nmax.mcpde.max_error = 0.05\n");
  cfg.out_dir = out;
  cfg.plots = false;
  return cfg;
}

}  // namespace

TEST_CASE("empty pipeline writes only the manifest") {
  const fs::path dir = fs::temp_directory_path() / "levyop_noop";
  fs::remove_all(dir);
  ExperimentConfig cfg = parse_config("[experiment]\nkind = none\n");
  cfg.out_dir = dir;
  const ExperimentResult r = run_experiment(cfg);
  CHECK(r.status == 0);
  CHECK(r.stages.empty());
  std::size_t count = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    CHECK(e.path().filename() == "manifest.txt");
    ++count;
  }
  CHECK(count == 1);
  fs::remove_all(dir);
}

TEST_CASE("invalid config fails before any output") {
  const fs::path dir = fs::temp_directory_path() / "levyop_bad";
  fs::remove_all(dir);
  ExperimentConfig cfg = parse_config("[experiment]\nkind = symbol\n[kernel]\nalpha = 2.5\n");
  cfg.out_dir = dir;
  CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
  CHECK_FALSE(fs::exists(dir / "manifest.txt"));
}

TEST_CASE("crosscheck passes and its CSVs are bit-stable") {
  const fs::path a = fs::temp_directory_path() / "levyop_cc_a", b = fs::temp_directory_path() / "levyop_cc_b";
  fs::remove_all(a);
  fs::remove_all(b);
  const ExperimentResult ra = run_experiment(small_crosscheck(a));
  const ExperimentResult rb = run_experiment(small_crosscheck(b));
  CHECK(ra.status == 0);
  CHECK(ra.stages == std::vector<std::string>{"symbol", "resolvent", "cauchy", "simulate", "mcpde"});
  CHECK(ra.metrics.count("mcpde.max_error") == 1);
  REQUIRE(ra.files == rb.files);
  for (const auto& f : ra.files)
    if (f.ends_with(".csv")) CHECK_MESSAGE(slurp(a / f) == slurp(b / f), f);
  const std::string manifest = slurp(a / "manifest.txt");
  CHECK(manifest.find("config_hash") != std::string::npos);
  CHECK(manifest.find("seed") != std::string::npos);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("a failing declared check sets a nonzero status") {
  const fs::path dir = fs::temp_directory_path() / "levyop_fail";
  fs::remove_all(dir);
  ExperimentConfig cfg = parse_config("[experiment]\nkind = symbol\n[grid]\npoints = 32\n[checks]\nmax.symbol.R = 1e-6\n");
  cfg.out_dir = dir;
  cfg.plots = false;
  const ExperimentResult r = run_experiment(cfg);
  CHECK(r.status != 0);
  REQUIRE(r.checks.size() == 1);
  CHECK(r.checks[0].found);
  CHECK_FALSE(r.checks[0].passed);
  fs::remove_all(dir);
}
