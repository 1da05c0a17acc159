#pragma once

// Batch jobs driven by an ExperimentConfig. Every job writes manifest.json
// into its output directory together with CSV series and binary fields.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "solitonforge/config.hpp"
#include "solitonforge/errors.hpp"
#include "solitonforge/grid.hpp"
#include "solitonforge/nonlinearity.hpp"
#include "solitonforge/waveforms.hpp"

namespace solitonforge {

inline constexpr const char* kVersion = "1.0.0";

struct JobOptions {
  std::filesystem::path out_dir = "out";
  int workers = 1;
  std::ostream* log = nullptr;  // warnings and progress; null silences them
};

struct JobResult {
  int exit_code = 0;
  json summary = json::object();
  std::string message;
};

/// 2 for admissibility failures, 1 for everything else.
int exit_code_for(ErrorKind kind) noexcept;

/// Command-line value, then SOLITONFORGE_WORKERS, then 1.
int resolve_workers(std::optional<int> requested);

/// Runs `job` (or the config's job key when empty). Never throws for solver
/// or config failures; they become the exit code and the manifest status.
JobResult run_job(const std::string& job, const ExperimentConfig& config, const JobOptions& options);

NonlinearitySpec build_nonlinearity(const ExperimentConfig& config);
Grid1D build_grid(const ExperimentConfig& config);
TrainSpec build_train(const ExperimentConfig& config, const NonlinearitySpec& spec);

}  // namespace solitonforge
