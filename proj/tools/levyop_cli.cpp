#include <iostream>
#include <omp.h>

#include "CLI11.hpp"
#include "levyop/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"levyop: Levy-type operators with Holder coefficients"};
  app.require_subcommand(0, 1);
  std::string config_path;
  long seed = -1;
  std::string out_dir;
  int threads = 0;
  bool no_plots = false;
  app.add_option("--config", config_path, "INI experiment config");
  app.add_option("--seed", seed, "Override the master seed")->check(CLI::NonNegativeNumber);
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--threads", threads, "OpenMP threads (0 keeps the default)")->check(CLI::NonNegativeNumber);
  app.add_flag("--no-plots", no_plots, "Skip the gnuplot script");

  const std::vector<std::pair<std::string, std::string>> verbs{
      {"validate", "Check the kernel assumptions on sample sets"},
      {"symbol", "Tabulate the symbol and its sector constants"},
      {"resolvent", "Neumann resolvent solve and generator-bound scan"},
      {"cauchy", "Backward-Euler Cauchy problem with regularity report"},
      {"simulate", "Simulate the jump process"},
      {"verify", "Martingale residual with power check"},
      {"crosscheck", "Symbol, resolvent, Cauchy, simulation and MC/PDE comparison"},
      {"bench", "Serial vs OpenMP x-form timing"},
  };
  for (const auto& [name, help] : verbs) app.add_subcommand(name, help);

  CLI11_PARSE(app, argc, argv);

  try {
    levyop::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = levyop::load_config(config_path);
    if (const auto subs = app.get_subcommands(); !subs.empty()) {
      cfg.kind = subs.front()->get_name();
      cfg.pipeline_given = false;
    }
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (no_plots) cfg.plots = false;
    if (threads > 0) cfg.threads = threads;
    if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
    const levyop::ExperimentResult res = levyop::run_experiment(cfg, &std::cerr);
    for (const auto& [k, v] : res.metrics) std::cout << k << " = " << v << '\n';
    for (const auto& c : res.checks) {
      std::cout << (c.passed ? "PASS " : "FAIL ") << (c.check.upper ? "max." : "min.") << c.check.metric
                << (c.check.upper ? " <= " : " >= ") << c.check.bound << " (value ";
      if (c.found)
        std::cout << c.value;
      else
        std::cout << "missing";
      std::cout << ")\n";
    }
    std::cout << "artifacts in " << res.dir.string() << '\n';
    return res.status;
  } catch (const levyop::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
