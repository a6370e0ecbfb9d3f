#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "levyop/errors.hpp"
#include "levyop/io.hpp"

namespace levyop {

/// A module error annotated with the pipeline stage it came from.
class StageError : public Error {
 public:
  StageError(const std::string& stage, const std::string& what)
      : Error("stage '" + stage + "': " + what), stage_(stage) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

struct CheckOutcome {
  CheckSpec check;
  double value = 0.0;
  bool found = false;
  bool passed = false;
};

struct ExperimentResult {
  std::filesystem::path dir;
  std::vector<std::string> stages;
  /// Metric name -> value, e.g. "resolvent.iterations".
  std::map<std::string, double> metrics;
  std::vector<CheckOutcome> checks;
  /// Files written, relative to dir; the manifest lists all of them.
  std::vector<std::string> files;
  /// 0 iff every declared check passed.
  int status = 0;
};

/// Validates the config, runs its stages in order, writes CSVs, optional plot
/// scripts and manifest.txt into cfg.out_dir.  Progress lines go to `log`
/// when given.  Module errors are rethrown as StageError.
ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream* log = nullptr);

}  // namespace levyop
