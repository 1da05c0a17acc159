#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "solitonforge/config.hpp"
#include "solitonforge/jobs.hpp"

int main(int argc, char** argv) {
  using namespace solitonforge;
  CLI::App app{"Soliton train assembly, evolution and gluing experiments"};
  std::string job;
  std::string config_path;
  std::string out_dir;
  std::optional<int> workers;
  app.add_option("job", job, "profile | assemble | evolve | glue | sweep | check")
      ->required()
      ->check(CLI::IsMember({"profile", "assemble", "evolve", "glue", "sweep", "check"}));
  app.add_option("--config", config_path, "TOML or JSON experiment file")->required();
  app.add_option("--out", out_dir, "output directory (default: the config's output key, then ./out)");
  app.add_option("--workers", workers, "concurrent sweep points (default: $SOLITONFORGE_WORKERS or 1)")
      ->check(CLI::PositiveNumber);
  app.set_version_flag("--version", kVersion);
  CLI11_PARSE(app, argc, argv);

  try {
    const ExperimentConfig config = load_config(config_path);
    JobOptions options;
    options.out_dir = out_dir;
    options.workers = resolve_workers(workers);
    options.log = &std::cerr;
    const JobResult result = run_job(job, config, options);
    if (result.exit_code != 0) std::cerr << "error: " << result.message << '\n';
    return result.exit_code;
  } catch (const SolverError& e) {
    std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << '\n';
    return exit_code_for(e.kind());
  }
}
