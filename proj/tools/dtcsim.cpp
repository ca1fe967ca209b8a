#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dtc/config.hpp"
#include "dtc/execute.hpp"
#include "dtc/krylov.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Kicked Ising chain simulator: stroboscopic dynamics, spectra and Floquet pairing"};
  app.set_version_flag("--version", std::string(dtc::kProgramVersion));
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::vector<std::string> overrides;
  bool print_config = false;

  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--seed", seed, "Kick-noise seed");
  app.add_option("--threads", threads, "Worker threads (0: all cores)");
  app.add_option("--set", overrides, "Override a config key: key=value (repeatable)");
  app.add_flag("--print-config", print_config, "Print the canonical config and exit");

  for (const auto command : {dtc::Command::run, dtc::Command::scan, dtc::Command::floquet, dtc::Command::lmg,
                             dtc::Command::fit}) {
    app.add_subcommand(std::string(dtc::to_string(command)));
  }
  CLI11_PARSE(app, argc, argv);

  dtc::ExperimentConfig config;
  try {
    config = config_path.empty() ? dtc::parse_config("") : dtc::load_config(config_path);
    config.command = dtc::command_from_string(app.get_subcommands().front()->get_name());
    for (const std::string& o : overrides) {
      dtc::apply_override(config, o);
    }
    if (!out_dir.empty()) {
      config.output_dir = out_dir;
    }
    if (seed) {
      config.drive.rng_seed = *seed;
    }
    if (threads) {
      config.threads = *threads;
    }
    dtc::validate(config);
  } catch (const std::exception& e) {
    std::cerr << dtc::error_json("config", e.what()) << "\n";
    return 2;
  }

  if (print_config) {
    std::cout << dtc::emit_config(config);
    return 0;
  }

  try {
    const dtc::ExecutionResult result = dtc::execute(config);
    for (const auto& path : result.files) {
      std::cout << path.string() << "\n";
    }
  } catch (const dtc::ConvergenceError& e) {
    std::cerr << dtc::error_json("convergence", e.what()) << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << dtc::error_json("pipeline", e.what()) << "\n";
    return 1;
  }
  return 0;
}
