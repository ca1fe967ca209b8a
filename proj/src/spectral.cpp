#include "dtc/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include <fftw3.h>

#include "dtc/parallel.hpp"

namespace dtc {

namespace {

constexpr double kPi = std::numbers::pi;

// FFTW's planner is not thread-safe; execution is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// DFT magnitudes of a real series, all M bins.
std::vector<double> dft_magnitudes(std::span<const double> series) {
  const std::size_t m = series.size();
  std::vector<double> in(series.begin(), series.end());
  std::vector<fftw_complex> out(m / 2 + 1);
  fftw_plan plan;
  {
    const std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(m), in.data(), out.data(), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    const std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  std::vector<double> mag(m);
  for (std::size_t k = 0; k <= m / 2; ++k) {
    mag[k] = std::hypot(out[k][0], out[k][1]);
  }
  for (std::size_t k = m / 2 + 1; k < m; ++k) {
    mag[k] = mag[m - k];
  }
  return mag;
}

// Bins ordered by folded frequency in [-pi, pi), or natural order.
Spectrum arrange(const std::vector<double>& weights, bool fold) {
  const std::size_t m = weights.size();
  Spectrum s;
  s.folded = fold;
  s.omega_tau.resize(m);
  s.amplitude.resize(m);
  if (!fold) {
    for (std::size_t k = 0; k < m; ++k) {
      s.omega_tau[k] = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(m);
      s.amplitude[k] = weights[k];
    }
    return s;
  }
  // First bin with 2 pi k / M >= pi.
  const std::size_t first_negative = (m + 1) / 2;
  std::size_t out = 0;
  for (std::size_t k = first_negative; k < m; ++k, ++out) {
    s.omega_tau[out] = 2.0 * kPi * (static_cast<double>(k) - static_cast<double>(m)) / static_cast<double>(m);
    s.amplitude[out] = weights[k];
  }
  for (std::size_t k = 0; k < first_negative; ++k, ++out) {
    s.omega_tau[out] = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(m);
    s.amplitude[out] = weights[k];
  }
  return s;
}

bool in_subharmonic_window(double omega, bool folded) {
  return folded ? std::abs(omega) > 0.5 * kPi : (omega > 0.5 * kPi && omega < 1.5 * kPi);
}

}  // namespace

Spectrum fourier_spectrum(std::span<const double> series, bool fold) {
  if (series.size() < kMinSeriesLength) {
    throw std::invalid_argument("fourier_spectrum: need at least " + std::to_string(kMinSeriesLength) +
                                " samples (got " + std::to_string(series.size()) + ")");
  }
  std::vector<double> mag = dft_magnitudes(series);
  double total = 0.0;
  for (double v : mag) {
    total += v;
  }
  if (total == 0.0) {
    // All-zero series: by convention a delta at omega = 0.
    std::fill(mag.begin(), mag.end(), 0.0);
    mag[0] = 1.0;
    total = 1.0;
  }
  for (double& v : mag) {
    v /= total;
  }
  return arrange(mag, fold);
}

Spectrum reference_spectrum(std::size_t n_periods, bool fold) {
  std::vector<double> cosine(n_periods);
  for (std::size_t n = 0; n < n_periods; ++n) {
    cosine[n] = (n % 2 == 0) ? 1.0 : -1.0;
  }
  Spectrum ref = fourier_spectrum(cosine, fold);
  double total = 0.0;
  for (double& a : ref.amplitude) {
    a += kReferenceFloor;
    total += a;
  }
  for (double& a : ref.amplitude) {
    a /= total;
  }
  return ref;
}

double kld(const Spectrum& spectrum, const Spectrum& reference) {
  if (spectrum.size() != reference.size() || spectrum.folded != reference.folded) {
    throw std::invalid_argument("kld: spectra are on different frequency grids");
  }
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    if (std::abs(spectrum.omega_tau[k] - reference.omega_tau[k]) > 1e-12) {
      throw std::invalid_argument("kld: spectra are on different frequency grids");
    }
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    const double a = spectrum.amplitude[k];
    if (a > 0.0) {
      sum += a * std::log(a / reference.amplitude[k]);
    }
  }
  return sum;
}

PeakSplitting main_peak_splitting(const Spectrum& spectrum) {
  std::vector<double> window;
  PeakSplitting peak;
  bool found = false;
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    const double omega = spectrum.omega_tau[k];
    if (!in_subharmonic_window(omega, spectrum.folded)) {
      continue;
    }
    const double a = spectrum.amplitude[k];
    window.push_back(a);
    if (!found || a > peak.peak_amplitude) {
      found = true;
      peak.peak_amplitude = a;
      peak.omega_f = omega;
    }
  }
  if (!found) {
    throw std::invalid_argument("main_peak_splitting: no bins in the subharmonic window");
  }
  peak.delta_omega = spectrum.folded ? kPi - std::abs(peak.omega_f) : std::abs(peak.omega_f - kPi);
  const auto mid = window.begin() + static_cast<std::ptrdiff_t>(window.size() / 2);
  std::nth_element(window.begin(), mid, window.end());
  peak.median_amplitude = *mid;
  peak.prominent = peak.peak_amplitude > 3.0 * peak.median_amplitude;
  return peak;
}

SpectralPeak dominant_peak(const Spectrum& spectrum) {
  SpectralPeak best;
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    if (k == 0 || spectrum.amplitude[k] > best.amplitude) {
      best = {spectrum.omega_tau[k], spectrum.amplitude[k]};
    }
  }
  return best;
}

ScalingFit fit_splitting_scaling(std::span<const SplittingSample> samples, double resolution_floor) {
  std::map<int, std::vector<SplittingSample>> by_size;
  ScalingFit result;
  for (const SplittingSample& s : samples) {
    if (!(s.epsilon > 0.0)) {
      throw std::invalid_argument("fit_splitting_scaling: epsilon must be > 0");
    }
    if (!(s.delta_omega > resolution_floor) || !(s.delta_omega > 0.0)) {
      result.warnings.push_back("N=" + std::to_string(s.n_sites) + " eps=" + std::to_string(s.epsilon) +
                                ": splitting at the resolution floor, excluded");
      continue;
    }
    by_size[s.n_sites].push_back(s);
  }

  std::vector<double> sizes;
  std::vector<double> slopes;
  std::vector<double> intercepts;
  for (const auto& [n, points] : by_size) {
    if (points.size() < 3) {
      result.warnings.push_back("N=" + std::to_string(n) + ": only " + std::to_string(points.size()) +
                                " usable epsilon points, size excluded");
      continue;
    }
    std::vector<double> x;
    std::vector<double> y;
    for (const SplittingSample& s : points) {
      x.push_back(std::log(s.epsilon));
      y.push_back(std::log(s.delta_omega));
    }
    SizeFit size_fit{n, fit_line(x, y)};
    result.per_size.push_back(size_fit);
    sizes.push_back(n);
    slopes.push_back(size_fit.a());
    intercepts.push_back(size_fit.b());
  }
  if (result.per_size.size() < 3) {
    throw std::invalid_argument("fit_splitting_scaling: need at least three system sizes with "
                                ">= 3 usable epsilon points (have " +
                                std::to_string(result.per_size.size()) + ")");
  }
  result.slope_fit = fit_line(sizes, slopes);
  result.intercept_fit = fit_line(sizes, intercepts);
  result.m_a = result.slope_fit.slope;
  result.m_b = result.intercept_fit.slope;
  result.epsilon_star = std::exp(-result.m_b / result.m_a);
  return result;
}

std::string_view to_string(ScanParameter parameter) {
  switch (parameter) {
    case ScanParameter::epsilon:
      return "epsilon";
    case ScanParameter::j_tau:
      return "j_tau";
    case ScanParameter::h_over_j:
      return "h_over_j";
  }
  return "unknown";
}

ScanParameter scan_parameter_from_string(std::string_view name) {
  for (auto p : {ScanParameter::epsilon, ScanParameter::j_tau, ScanParameter::h_over_j}) {
    if (name == to_string(p)) {
      return p;
    }
  }
  throw std::invalid_argument("unknown scan parameter '" + std::string(name) +
                              "' (expected epsilon, j_tau or h_over_j)");
}

std::vector<double> ScanGrid::values() const {
  if (steps < 2) {
    throw std::invalid_argument("scan grid needs at least 2 points");
  }
  if (!(max > min)) {
    throw std::invalid_argument("scan grid needs max > min");
  }
  std::vector<double> v(steps);
  for (int i = 0; i < steps; ++i) {
    v[i] = min + (max - min) * static_cast<double>(i) / static_cast<double>(steps - 1);
  }
  return v;
}

void apply_scan_value(ScanParameter parameter, double value, HamiltonianSpec& hamiltonian,
                      DriveSpec& drive) {
  switch (parameter) {
    case ScanParameter::epsilon:
      drive.epsilon = value;
      break;
    case ScanParameter::j_tau:
      if (hamiltonian.coupling == 0.0) {
        throw std::invalid_argument("a J*tau scan needs J != 0");
      }
      drive.period_tau = value / hamiltonian.coupling;
      break;
    case ScanParameter::h_over_j:
      hamiltonian.field = value * hamiltonian.coupling;
      break;
  }
}

PhaseMap scan_phase_map(const HamiltonianSpec& base_hamiltonian, const DriveSpec& base_drive,
                        InitialStateKind initial_state, const ScanGrid& grid, PropagatorOptions options,
                        int threads) {
  const std::vector<double> values = grid.values();
  if (base_drive.n_periods < static_cast<int>(kMinSeriesLength)) {
    throw std::invalid_argument("scan needs at least " + std::to_string(kMinSeriesLength) + " periods");
  }
  const Spectrum reference = reference_spectrum(base_drive.n_periods);

  PhaseMap map;
  map.parameter = grid.parameter;
  map.points.resize(values.size());
  parallel_for(values.size(), threads, [&](std::size_t i) {
    ScanPoint& point = map.points[i];
    point.parameter = values[i];
    try {
      HamiltonianSpec h = base_hamiltonian;
      DriveSpec d = base_drive;
      apply_scan_value(grid.parameter, values[i], h, d);
      point.trajectory = run_trajectory(h, d, initial_state, options);
      point.spectrum = fourier_spectrum(point.trajectory.mx_series);
      point.kld = kld(point.spectrum, reference);
      point.peak = main_peak_splitting(point.spectrum);
      point.ok = true;
    } catch (const std::exception& e) {
      point.ok = false;
      point.error = e.what();
    }
  });
  for (const ScanPoint& p : map.points) {
    if (p.ok) {
      for (double a : p.spectrum.amplitude) {
        map.max_amplitude = std::max(map.max_amplitude, a);
      }
    }
  }
  return map;
}

}  // namespace dtc
