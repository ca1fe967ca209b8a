#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dtc/dynamics.hpp"
#include "dtc/linear_fit.hpp"

namespace dtc {

/// Normalized DFT magnitudes of a stroboscopic series. Bin k sits at
/// omega*tau = 2 pi k / M; a folded spectrum maps that into [-pi, pi) and
/// orders the bins by frequency.
struct Spectrum {
  std::vector<double> omega_tau;
  std::vector<double> amplitude;  // >= 0, sums to 1
  bool folded = true;

  std::size_t size() const { return amplitude.size(); }
};

inline constexpr std::size_t kMinSeriesLength = 16;

Spectrum fourier_spectrum(std::span<const double> series, bool fold = true);

/// Added to every bin of the reference spectrum before renormalizing.
inline constexpr double kReferenceFloor = 1e-9;

/// Spectrum of cos(pi n), n = 0..M-1, regularized with kReferenceFloor.
Spectrum reference_spectrum(std::size_t n_periods, bool fold = true);

/// sum_w A_w ln(A_w / A_w^ref). Throws on mismatched bin grids.
double kld(const Spectrum& spectrum, const Spectrum& reference);

/// Main subharmonic peak: the largest bin with |omega tau| > pi/2.
struct PeakSplitting {
  double delta_omega = 0.0;  // |omega_f tau - pi|
  double omega_f = 0.0;      // in the spectrum's own frequency convention
  bool prominent = false;    // max > 3 x median of the window
  double peak_amplitude = 0.0;
  double median_amplitude = 0.0;
};

PeakSplitting main_peak_splitting(const Spectrum& spectrum);

/// Largest-amplitude bin over the whole spectrum, with its frequency.
struct SpectralPeak {
  double omega_tau = 0.0;
  double amplitude = 0.0;
};
SpectralPeak dominant_peak(const Spectrum& spectrum);

/// One (N, epsilon, delta_omega) measurement for the splitting-scaling fit.
struct SplittingSample {
  int n_sites = 0;
  double epsilon = 0.0;
  double delta_omega = 0.0;
};

struct SizeFit {
  int n_sites = 0;
  LinearFit fit;  // ln(delta_omega) = b + a ln(epsilon); slope a, intercept b
  double a() const { return fit.slope; }
  double b() const { return fit.intercept; }
};

struct ScalingFit {
  std::vector<SizeFit> per_size;
  LinearFit slope_fit;      // a(N) against N
  LinearFit intercept_fit;  // b(N) against N
  double m_a = 0.0;
  double m_b = 0.0;
  double epsilon_star = 0.0;  // exp(-m_b / m_a)
  std::vector<std::string> warnings;
};

/// OLS per N, then OLS of a(N) and b(N) on N. Samples with
/// delta_omega <= resolution_floor are dropped with a warning; sizes with
/// fewer than three usable points are dropped too. Needs three sizes.
ScalingFit fit_splitting_scaling(std::span<const SplittingSample> samples, double resolution_floor = 0.0);

enum class ScanParameter { epsilon, j_tau, h_over_j };

std::string_view to_string(ScanParameter parameter);
ScanParameter scan_parameter_from_string(std::string_view name);

struct ScanGrid {
  ScanParameter parameter = ScanParameter::epsilon;
  double min = 0.0;
  double max = 0.5;
  int steps = 51;  // number of grid points, endpoints included

  std::vector<double> values() const;
};

struct ScanPoint {
  double parameter = 0.0;
  bool ok = false;
  std::string error;
  Spectrum spectrum;
  double kld = 0.0;
  PeakSplitting peak;
  TrajectoryResult trajectory;
};

struct PhaseMap {
  ScanParameter parameter = ScanParameter::epsilon;
  std::vector<ScanPoint> points;  // grid order
  double max_amplitude = 0.0;     // over every successful point and bin
};

/// Runs one trajectory per grid point (the other parameters fixed by the base
/// specs) and analyses its spectrum. A failing point is recorded, not thrown.
PhaseMap scan_phase_map(const HamiltonianSpec& base_hamiltonian, const DriveSpec& base_drive,
                        InitialStateKind initial_state, const ScanGrid& grid,
                        PropagatorOptions options = {}, int threads = 1);

/// Applies one grid value to the base specs.
void apply_scan_value(ScanParameter parameter, double value, HamiltonianSpec& hamiltonian,
                      DriveSpec& drive);

}  // namespace dtc
