#include "dtc/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace dtc {

namespace {

using Json = nlohmann::ordered_json;

constexpr double kInf = std::numeric_limits<double>::infinity();

Json to_json(const ExperimentConfig& c) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = std::string(to_string(c.command));
  j["n_sites"] = c.hamiltonian.n_sites;
  j["coupling"] = c.hamiltonian.coupling;
  j["field"] = c.hamiltonian.field;
  if (c.hamiltonian.range_exponent == kInf) {
    j["range_exponent"] = "inf";
  } else {
    j["range_exponent"] = c.hamiltonian.range_exponent;
  }
  j["period_tau"] = c.drive.period_tau;
  j["epsilon"] = c.drive.epsilon;
  j["noise_bound"] = c.drive.noise_bound;
  j["n_periods"] = c.drive.n_periods;
  j["seed"] = c.drive.rng_seed;
  j["realizations"] = c.realizations;
  j["initial_state"] = std::string(to_string(c.initial_state));
  j["method"] = std::string(to_string(c.method));
  j["tolerance"] = c.tolerance;
  j["scan_parameter"] = std::string(to_string(c.scan.parameter));
  j["scan_min"] = c.scan.min;
  j["scan_max"] = c.scan.max;
  j["scan_steps"] = c.scan.steps;
  j["sizes"] = c.sizes;
  j["epsilons"] = c.epsilons;
  j["output_dir"] = c.output_dir;
  j["threads"] = c.threads;
  return j;
}

[[noreturn]] void type_error(const std::string& key, const char* expected) {
  throw ConfigError("config key '" + key + "': expected " + expected);
}

double get_double(const Json& j, const std::string& key) {
  const Json& v = j.at(key);
  if (!v.is_number()) {
    type_error(key, "a number");
  }
  return v.get<double>();
}

int get_int(const Json& j, const std::string& key) {
  const Json& v = j.at(key);
  if (!v.is_number_integer()) {
    type_error(key, "an integer");
  }
  const auto wide = v.get<std::int64_t>();
  if (wide < std::numeric_limits<int>::min() || wide > std::numeric_limits<int>::max()) {
    throw ConfigError("config key '" + key + "': integer out of range");
  }
  return static_cast<int>(wide);
}

std::string get_string(const Json& j, const std::string& key) {
  const Json& v = j.at(key);
  if (!v.is_string()) {
    type_error(key, "a string");
  }
  return v.get<std::string>();
}

template <class F>
auto named(const std::string& key, F&& parse) {
  try {
    return parse();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("config key '" + key + "': " + e.what());
  }
}

ExperimentConfig from_json(const Json& j) {
  ExperimentConfig c;
  if (get_int(j, "schema_version") != kSchemaVersion) {
    throw ConfigError("config key 'schema_version': only version " + std::to_string(kSchemaVersion) +
                      " is supported");
  }
  c.command = named("command", [&] { return command_from_string(get_string(j, "command")); });
  c.hamiltonian.n_sites = get_int(j, "n_sites");
  c.hamiltonian.coupling = get_double(j, "coupling");
  c.hamiltonian.field = get_double(j, "field");
  const Json& alpha = j.at("range_exponent");
  if (alpha.is_string()) {
    const auto s = alpha.get<std::string>();
    if (s != "inf") {
      type_error("range_exponent", "a number or \"inf\"");
    }
    c.hamiltonian.range_exponent = kInf;
  } else {
    c.hamiltonian.range_exponent = get_double(j, "range_exponent");
  }
  c.drive.period_tau = get_double(j, "period_tau");
  c.drive.epsilon = get_double(j, "epsilon");
  c.drive.noise_bound = get_double(j, "noise_bound");
  c.drive.n_periods = get_int(j, "n_periods");
  const Json& seed = j.at("seed");
  if (!seed.is_number_unsigned()) {
    type_error("seed", "a non-negative integer");
  }
  c.drive.rng_seed = seed.get<std::uint64_t>();
  c.realizations = get_int(j, "realizations");
  c.initial_state =
      named("initial_state", [&] { return initial_state_from_string(get_string(j, "initial_state")); });
  c.method = named("method", [&] { return method_from_string(get_string(j, "method")); });
  c.tolerance = get_double(j, "tolerance");
  c.scan.parameter =
      named("scan_parameter", [&] { return scan_parameter_from_string(get_string(j, "scan_parameter")); });
  c.scan.min = get_double(j, "scan_min");
  c.scan.max = get_double(j, "scan_max");
  c.scan.steps = get_int(j, "scan_steps");
  if (!j.at("sizes").is_array()) {
    type_error("sizes", "an array of integers");
  }
  c.sizes.clear();
  for (const Json& v : j.at("sizes")) {
    if (!v.is_number_integer()) {
      type_error("sizes", "an array of integers");
    }
    c.sizes.push_back(v.get<int>());
  }
  if (!j.at("epsilons").is_array()) {
    type_error("epsilons", "an array of numbers");
  }
  c.epsilons.clear();
  for (const Json& v : j.at("epsilons")) {
    if (!v.is_number()) {
      type_error("epsilons", "an array of numbers");
    }
    c.epsilons.push_back(v.get<double>());
  }
  c.output_dir = get_string(j, "output_dir");
  c.threads = get_int(j, "threads");
  return c;
}

void require(bool ok, const std::string& message) {
  if (!ok) {
    throw ConfigError(message);
  }
}

bool finite(double v) { return std::isfinite(v); }

}  // namespace

std::string_view to_string(Command command) {
  switch (command) {
    case Command::run:
      return "run";
    case Command::scan:
      return "scan";
    case Command::floquet:
      return "floquet";
    case Command::lmg:
      return "lmg";
    case Command::fit:
      return "fit";
  }
  return "unknown";
}

Command command_from_string(std::string_view name) {
  for (auto c : {Command::run, Command::scan, Command::floquet, Command::lmg, Command::fit}) {
    if (name == to_string(c)) {
      return c;
    }
  }
  throw ConfigError("unknown command '" + std::string(name) + "' (expected run, scan, floquet, lmg or fit)");
}

std::string_view to_string(PropagationMethod method) {
  switch (method) {
    case PropagationMethod::automatic:
      return "automatic";
    case PropagationMethod::x_diagonal:
      return "x_diagonal";
    case PropagationMethod::exact_eigen:
      return "exact_eigen";
    case PropagationMethod::krylov:
      return "krylov";
  }
  return "unknown";
}

PropagationMethod method_from_string(std::string_view name) {
  for (auto m : {PropagationMethod::automatic, PropagationMethod::x_diagonal, PropagationMethod::exact_eigen,
                 PropagationMethod::krylov}) {
    if (name == to_string(m)) {
      return m;
    }
  }
  throw ConfigError("unknown method '" + std::string(name) +
                    "' (expected automatic, x_diagonal, exact_eigen or krylov)");
}

std::string emit_config(const ExperimentConfig& config) { return to_json(config).dump(2) + "\n"; }

ExperimentConfig parse_config(std::string_view json_text) {
  Json input;
  bool blank = true;
  for (char ch : json_text) {
    blank = blank && std::isspace(static_cast<unsigned char>(ch));
  }
  if (!blank) {
    try {
      input = Json::parse(json_text);
    } catch (const Json::parse_error& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!input.is_object()) {
      throw ConfigError("config must be a JSON object");
    }
  }
  Json merged = to_json(ExperimentConfig{});
  for (const auto& [key, value] : input.items()) {
    if (!merged.contains(key)) {
      throw ConfigError("unknown config key '" + key + "'");
    }
    merged[key] = value;
  }
  ExperimentConfig config = from_json(merged);
  validate(config);
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot read config file '" + path.string() + "'");
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

void apply_override(ExperimentConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("override '" + std::string(assignment) + "' is not of the form key=value");
  }
  const std::string key(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  Json j = to_json(config);
  if (!j.contains(key)) {
    throw ConfigError("unknown config key '" + key + "'");
  }
  Json value = Json::parse(text, nullptr, false);
  if (value.is_discarded()) {
    value = text;
  }
  j[key] = value;
  config = from_json(j);
}

void validate(const ExperimentConfig& c) {
  const HamiltonianSpec& h = c.hamiltonian;
  const DriveSpec& d = c.drive;
  const int max_sites = c.command == Command::lmg       ? 1000
                        : c.command == Command::floquet ? kExactEigenMaxSites
                                                        : kMaxSites;
  require(h.n_sites >= 2 && h.n_sites <= max_sites,
          "n_sites must be in [2, " + std::to_string(max_sites) + "] for command '" +
              std::string(to_string(c.command)) + "'");
  require(finite(h.coupling), "coupling must be finite");
  require(finite(h.field), "field must be finite");
  require(h.range_exponent > 0.0, "range_exponent must be > 0 (or \"inf\")");
  require(finite(d.period_tau) && d.period_tau > 0.0, "period_tau must be finite and > 0");
  require(finite(d.epsilon) && d.epsilon >= 0.0 && d.epsilon <= 1.0, "epsilon must be in [0, 1]");
  require(finite(d.noise_bound) && d.noise_bound >= 0.0 && d.noise_bound <= 1.0,
          "noise_bound must be in [0, 1]");
  require(d.n_periods >= static_cast<int>(kMinSeriesLength) && d.n_periods <= 10'000'000,
          "n_periods must be in [" + std::to_string(kMinSeriesLength) + ", 10000000]");
  require(c.realizations >= 1 && c.realizations <= 100'000, "realizations must be in [1, 100000]");
  require(finite(c.tolerance) && c.tolerance > 0.0 && c.tolerance <= 1e-3, "tolerance must be in (0, 1e-3]");
  require(c.threads >= 0, "threads must be >= 0 (0 means all cores)");
  require(!c.output_dir.empty(), "output_dir must not be empty");
  require(c.scan.steps >= 2 && c.scan.steps <= 100'000, "scan_steps must be in [2, 100000]");
  require(finite(c.scan.min) && finite(c.scan.max) && c.scan.max > c.scan.min,
          "scan_max must be greater than scan_min");
  for (double e : c.epsilons) {
    require(finite(e) && e >= 0.0 && e <= 1.0, "epsilons must lie in [0, 1]");
  }
  for (int n : c.sizes) {
    require(n >= 2 && n <= kMaxSites, "sizes must lie in [2, " + std::to_string(kMaxSites) + "]");
  }

  if (c.command == Command::floquet) {
    require(d.noise_bound == 0.0, "floquet needs a noise-free drive (noise_bound = 0)");
    require(c.sizes.size() >= 3, "floquet needs at least three sizes");
    for (int n : c.sizes) {
      require(n <= kExactEigenMaxSites,
              "floquet sizes are capped at N = " + std::to_string(kExactEigenMaxSites) + " (dense spectra)");
    }
    require(!c.epsilons.empty(), "floquet needs at least one epsilon");
  }
  if (c.command == Command::fit) {
    require(c.sizes.size() >= 3, "fit needs at least three sizes");
    require(c.epsilons.size() >= 3, "fit needs at least three epsilons");
    for (double e : c.epsilons) {
      require(e > 0.0, "fit epsilons must be > 0 (log scale)");
    }
  }
  if (c.command == Command::scan) {
    if (c.scan.parameter == ScanParameter::epsilon) {
      require(c.scan.min >= 0.0 && c.scan.max <= 1.0, "an epsilon scan must stay within [0, 1]");
    }
    if (c.scan.parameter == ScanParameter::j_tau) {
      require(c.scan.min > 0.0, "a j_tau scan needs scan_min > 0");
      require(h.coupling != 0.0, "a j_tau scan needs coupling != 0");
    }
  }
}

std::string config_hash(const ExperimentConfig& config) {
  ExperimentConfig physics = config;
  const ExperimentConfig defaults;
  physics.output_dir = defaults.output_dir;
  physics.threads = defaults.threads;
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : emit_config(physics)) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace dtc
