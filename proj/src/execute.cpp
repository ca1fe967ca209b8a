#include "dtc/execute.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <system_error>
#include <unistd.h>

#include <fftw3.h>
#include <json.hpp>

#include "dtc/floquet.hpp"
#include "dtc/lmg.hpp"
#include "dtc/parallel.hpp"

namespace dtc {

namespace {

using Json = nlohmann::ordered_json;

std::string cell(int v) { return std::to_string(v); }
std::string cell(std::size_t v) { return std::to_string(v); }
std::string cell(bool v) { return v ? "1" : "0"; }
std::string cell(double v) { return format_double(v); }

// Non-finite values are not JSON numbers; they go out as strings.
Json number(double v) {
  if (std::isfinite(v)) {
    return v;
  }
  return format_double(v);
}

class Writer {
 public:
  Writer(const ExperimentConfig& config, ExecutionResult& result)
      : dir_(config.output_dir), hash_(config_hash(config)), result_(result) {
    std::filesystem::create_directories(dir_);
  }

  const std::string& hash() const { return hash_; }
  CsvTable table(std::vector<std::string> columns) const { return CsvTable(hash_, std::move(columns)); }

  void file(const std::string& name, std::string_view contents) {
    const auto path = dir_ / name;
    write_atomic(path, contents);
    result_.files.push_back(path);
  }

  void json(const std::string& name, Json j) {
    Json wrapped;
    wrapped["config_hash"] = hash_;
    for (auto& [k, v] : j.items()) {
      wrapped[k] = std::move(v);
    }
    file(name, wrapped.dump(2) + "\n");
  }

 private:
  std::filesystem::path dir_;
  std::string hash_;
  ExecutionResult& result_;
};

std::string series_csv(const Writer& w, std::span<const double> series) {
  CsvTable t = w.table({"n", "mx"});
  for (std::size_t n = 0; n < series.size(); ++n) {
    t.row({cell(n), cell(series[n])});
  }
  return t.str();
}

std::string spectrum_csv(const Writer& w, const Spectrum& s) {
  CsvTable t = w.table({"omega_tau", "amplitude"});
  for (std::size_t k = 0; k < s.size(); ++k) {
    t.row({cell(s.omega_tau[k]), cell(s.amplitude[k])});
  }
  return t.str();
}

Json peak_json(const PeakSplitting& p) {
  return {{"omega_f_tau", number(p.omega_f)},
          {"delta_omega_tau", number(p.delta_omega)},
          {"prominent", p.prominent},
          {"peak_amplitude", number(p.peak_amplitude)},
          {"median_amplitude", number(p.median_amplitude)}};
}

Json spectral_summary(std::span<const double> series) {
  const Spectrum s = fourier_spectrum(series);
  const SpectralPeak top = dominant_peak(s);
  return {{"kld", number(kld(s, reference_spectrum(series.size())))},
          {"kld_reference_floor", kReferenceFloor},
          {"main_peak", peak_json(main_peak_splitting(s))},
          {"dominant_omega_tau", number(top.omega_tau)},
          {"dominant_amplitude", number(top.amplitude)}};
}

Json run_command(const ExperimentConfig& c, Writer& w) {
  const int threads = resolve_threads(c.threads);
  const EnsembleResult ensemble = run_noisy_ensemble(c.hamiltonian, c.drive, c.initial_state,
                                                     c.drive.noisy() ? c.realizations : 1, c.propagator(), threads);
  double drift = 0.0;
  int renormalizations = 0;
  for (const TrajectoryResult& r : ensemble.realizations) {
    drift = std::max(drift, r.norm_drift);
    renormalizations += r.renormalizations;
  }
  w.file("mx.csv", series_csv(w, ensemble.mean_series));
  w.file("spectrum.csv", spectrum_csv(w, fourier_spectrum(ensemble.mean_series)));
  Json out = spectral_summary(ensemble.mean_series);
  out["realizations"] = ensemble.realizations.size();
  out["max_norm_drift"] = number(drift);
  out["renormalizations"] = renormalizations;
  return out;
}

Json scan_command(const ExperimentConfig& c, Writer& w) {
  const PhaseMap map = scan_phase_map(c.hamiltonian, c.drive, c.initial_state, c.scan, c.propagator(),
                                      resolve_threads(c.threads));
  CsvTable phase = w.table({"param", "omega_tau", "amplitude_raw", "amplitude_maxnorm"});
  CsvTable klds = w.table({"param", "kld"});
  CsvTable peaks = w.table({"param", "omega_f_tau", "delta_omega_tau", "prominent", "peak_amplitude",
                            "median_amplitude", "dominant_omega_tau"});
  Json failures = Json::array();
  for (const ScanPoint& p : map.points) {
    if (!p.ok) {
      failures.push_back({{"param", number(p.parameter)}, {"error", p.error}});
      continue;
    }
    const std::string param = cell(p.parameter);
    for (std::size_t k = 0; k < p.spectrum.size(); ++k) {
      const double a = p.spectrum.amplitude[k];
      phase.row({param, cell(p.spectrum.omega_tau[k]), cell(a), cell(a / map.max_amplitude)});
    }
    klds.row({param, cell(p.kld)});
    peaks.row({param, cell(p.peak.omega_f), cell(p.peak.delta_omega), cell(p.peak.prominent),
               cell(p.peak.peak_amplitude), cell(p.peak.median_amplitude),
               cell(dominant_peak(p.spectrum).omega_tau)});
  }
  if (failures.size() == map.points.size()) {
    throw std::runtime_error("scan: every grid point failed, first error: " +
                             failures.front()["error"].get<std::string>());
  }
  w.file("phase_map.csv", phase.str());
  w.file("kld.csv", klds.str());
  w.file("peaks.csv", peaks.str());
  return {{"points", map.points.size()},
          {"kld_reference_floor", kReferenceFloor},
          {"max_amplitude", number(map.max_amplitude)},
          {"failed_points", failures}};
}

Json floquet_command(const ExperimentConfig& c, Writer& w) {
  const int threads = resolve_threads(c.threads);
  const PairingScaling scaling =
      pairing_size_scaling(c.hamiltonian, c.drive, c.sizes, c.epsilons, c.propagator(), threads);
  CsvTable points = w.table({"epsilon", "N", "mean_log_delta_0", "mean_log_delta_pi"});
  for (const PairingPoint& p : scaling.points) {
    points.row({cell(p.epsilon), cell(p.n_sites), cell(p.mean_log_delta_0), cell(p.mean_log_delta_pi)});
  }
  CsvTable slopes = w.table({"epsilon", "slope_b0", "slope_bpi", "pinned", "dtc_compatible"});
  for (const PairingSlope& s : scaling.slopes) {
    slopes.row({cell(s.epsilon), cell(s.slope_b0()), cell(s.slope_bpi()), cell(s.pinned), cell(s.dtc_compatible)});
  }

  const Eigen::MatrixXcd u = build_floquet_matrix(build_hamiltonian(c.hamiltonian), c.drive, c.propagator());
  const FloquetEigensystem es = floquet_eigensystem(u, c.drive.period_tau);
  CsvTable spectrum = w.table({"alpha", "mu", "parity"});
  for (std::size_t a = 0; a < es.quasi_energies.size(); ++a) {
    spectrum.row({cell(a), cell(es.quasi_energies[a]), cell(es.parities[a])});
  }
  const PairingGaps gaps = pairing_gaps(es);

  w.file("pairing.csv", points.str());
  w.file("pairing_slopes.csv", slopes.str());
  w.file("floquet_spectrum.csv", spectrum.str());
  return {{"gap_floor", kGapFloor},
          {"log", "natural"},
          {"spectrum",
           {{"n_sites", c.hamiltonian.n_sites},
            {"epsilon", number(c.drive.epsilon)},
            {"mean_log_delta_0", number(gaps.mean_log_delta_0)},
            {"mean_log_delta_pi", number(gaps.mean_log_delta_pi)},
            {"parity_blocks", es.parity_blocks},
            {"parity_commutator", number(es.parity_commutator)},
            {"unit_circle_error", number(es.unit_circle_error)}}}};
}

Json lmg_command(const ExperimentConfig& c, Writer& w) {
  const int n = c.hamiltonian.n_sites;
  const double field = c.hamiltonian.field;
  const double omega_1 = dicke_omega_1(n, field);
  const std::vector<double> exact =
      lmg_exact_trajectory(n, field, c.drive.period_tau, c.drive.epsilon, c.drive.n_periods);
  const LmgPerturbative closed = lmg_perturbative_mx(n, c.drive.epsilon, c.drive.period_tau, omega_1, c.drive.n_periods);
  double deviation = 0.0;
  for (std::size_t k = 0; k < exact.size(); ++k) {
    deviation = std::max(deviation, std::abs(exact[k] - closed.mx[k]));
  }
  w.file("mx.csv", series_csv(w, exact));
  w.file("mx_perturbative.csv", series_csv(w, closed.mx));
  w.file("spectrum.csv", spectrum_csv(w, fourier_spectrum(exact)));
  w.file("spectrum_perturbative.csv", spectrum_csv(w, fourier_spectrum(closed.mx)));
  Json out = spectral_summary(exact);
  out["omega_1"] = number(omega_1);
  out["prefactor"] = number(closed.prefactor);
  out["validity"] = number(closed.validity);
  out["validity_warning"] = closed.validity_warning;
  out["max_deviation"] = number(deviation);
  return out;
}

Json fit_command(const ExperimentConfig& c, Writer& w) {
  std::vector<SplittingSample> samples(c.sizes.size() * c.epsilons.size());
  parallel_for(samples.size(), resolve_threads(c.threads), [&](std::size_t i) {
    HamiltonianSpec h = c.hamiltonian;
    h.n_sites = c.sizes[i / c.epsilons.size()];
    DriveSpec d = c.drive;
    d.epsilon = c.epsilons[i % c.epsilons.size()];
    const TrajectoryResult t = run_trajectory(h, d, c.initial_state, c.propagator());
    samples[i] = {h.n_sites, d.epsilon, main_peak_splitting(fourier_spectrum(t.mx_series)).delta_omega};
  });
  const double floor = 2.0 * std::numbers::pi / c.drive.n_periods;
  CsvTable table = w.table({"N", "epsilon", "delta_omega_tau", "resolved"});
  for (const SplittingSample& s : samples) {
    table.row({cell(s.n_sites), cell(s.epsilon), cell(s.delta_omega), cell(s.delta_omega > floor)});
  }
  w.file("fit.csv", table.str());

  const ScalingFit fit = fit_splitting_scaling(samples, floor);
  Json per_size = Json::array();
  for (const SizeFit& s : fit.per_size) {
    per_size.push_back({{"N", s.n_sites},
                        {"a", number(s.a())},
                        {"b", number(s.b())},
                        {"r_squared", number(s.fit.r_squared)},
                        {"points", s.fit.points}});
  }
  Json result = {{"m_a", number(fit.m_a)},
                 {"m_b", number(fit.m_b)},
                 {"epsilon_star", number(fit.epsilon_star)},
                 {"resolution_floor", number(floor)},
                 {"per_size", per_size},
                 {"warnings", fit.warnings}};
  w.json("fit.json", result);
  return result;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw std::runtime_error("write to '" + tmp.string() + "' failed");
    }
  }
  std::filesystem::rename(tmp, path);
}

CsvTable::CsvTable(std::string config_hash, std::vector<std::string> columns) : width_(columns.size()) {
  text_ = "# config_hash=" + config_hash + "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) {
    text_ += (i ? "," : "") + columns[i];
  }
  text_ += "\n";
}

CsvTable& CsvTable::row(std::span<const std::string> cells) {
  if (cells.size() != width_) {
    throw std::logic_error("csv row has the wrong number of cells");
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) {
      text_ += ',';
    }
    text_ += cells[i];
  }
  text_ += '\n';
  return *this;
}

CsvTable& CsvTable::row(std::initializer_list<std::string> cells) {
  return row(std::span<const std::string>(cells.begin(), cells.size()));
}

ExecutionResult execute(const ExperimentConfig& config) {
  validate(config);
  ExecutionResult result;
  Writer w(config, result);
  Json summary;
  switch (config.command) {
    case Command::run:
      summary = run_command(config, w);
      break;
    case Command::scan:
      summary = scan_command(config, w);
      break;
    case Command::floquet:
      summary = floquet_command(config, w);
      break;
    case Command::lmg:
      summary = lmg_command(config, w);
      break;
    case Command::fit:
      summary = fit_command(config, w);
      break;
  }
  Json meta;
  meta["config"] = Json::parse(emit_config(config));
  meta["versions"] = {{"dtcsim", std::string(kProgramVersion)},
                      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                    "." + std::to_string(EIGEN_MINOR_VERSION)},
                      {"fftw", std::string(fftw_version)},
                      {"schema_version", kSchemaVersion}};
  meta["result"] = std::move(summary);
  w.json("meta.json", meta);
  return result;
}

std::string error_json(std::string_view type, std::string_view message) {
  Json j;
  j["error"] = {{"type", std::string(type)}, {"message", std::string(message)}};
  return j.dump();
}

}  // namespace dtc
