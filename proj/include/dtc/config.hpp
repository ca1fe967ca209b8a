#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dtc/dynamics.hpp"
#include "dtc/spectral.hpp"

namespace dtc {

enum class Command { run, scan, floquet, lmg, fit };

std::string_view to_string(Command command);
Command command_from_string(std::string_view name);
std::string_view to_string(PropagationMethod method);
PropagationMethod method_from_string(std::string_view name);

inline constexpr int kSchemaVersion = 1;

/// Thrown for unknown keys, wrong types and out-of-range values.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
  Command command = Command::run;
  HamiltonianSpec hamiltonian;
  DriveSpec drive;
  InitialStateKind initial_state = InitialStateKind::product_right;
  PropagationMethod method = PropagationMethod::automatic;
  double tolerance = 1e-10;
  int realizations = 1;

  ScanGrid scan;

  std::vector<int> sizes{4, 6, 8, 10};                       // fit and floquet
  std::vector<double> epsilons{0.0, 0.02, 0.05, 0.1, 0.2};  // fit and floquet

  std::string output_dir = "out";
  int threads = 0;  // 0: all available cores

  PropagatorOptions propagator() const { return {method, tolerance}; }
};

/// Canonical JSON text: fixed key order, two-space indent, trailing newline.
/// parse_config(emit_config(c)) == c and emitting a canonical file
/// reproduces it byte for byte.
std::string emit_config(const ExperimentConfig& config);

/// Defaults, then the JSON text (may be empty), then validation.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// One `key=value` override. The value is read as JSON when it parses,
/// otherwise as a bare string.
void apply_override(ExperimentConfig& config, std::string_view assignment);

/// Range checks, including the per-command size caps.
void validate(const ExperimentConfig& config);

/// 64-bit FNV-1a of the canonical text, as 16 hex digits. output_dir and
/// threads do not change results and are left out.
std::string config_hash(const ExperimentConfig& config);

}  // namespace dtc
