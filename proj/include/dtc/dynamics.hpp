#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dtc/hamiltonian.hpp"
#include "dtc/propagator.hpp"

namespace dtc {

enum class InitialStateKind {
  product_right,
  product_left,
  symmetry_broken_gs,  // ferromagnetic ground state of H0 at the spec's h/J
};

std::string_view to_string(InitialStateKind kind);
InitialStateKind initial_state_from_string(std::string_view name);

/// |R>, |L>, or for 0 < h/J < 1 the cat-state combination
/// (|E0> + s|E1>)/sqrt(2) of the lowest even- and odd-parity eigenstates with
/// s chosen so that m^x > 0. At h = 0 the symmetry-broken state is |R>.
StateVector prepare_initial_state(const HamiltonianSpec& spec, InitialStateKind kind);

/// Lowest eigenpairs of the two parity sectors (Lanczos), used for the
/// symmetry-broken preparation.
struct GroundDoublet {
  double even_energy;
  double odd_energy;
  StateVector even_state;
  StateVector odd_state;
};
GroundDoublet ground_doublet(const IsingHamiltonian& hamiltonian);

struct TrajectoryResult {
  std::vector<double> mx_series;  // mx_series[n] = m^x after n complete periods
  HamiltonianSpec hamiltonian;
  DriveSpec drive;
  InitialStateKind initial_state = InitialStateKind::product_right;
  std::uint64_t realization = 0;
  double norm_drift = 0.0;  // largest per-step drift seen
  int renormalizations = 0;
};

/// Magnetization series of `initial` under `map`; fills norm bookkeeping.
TrajectoryResult evolve_series(const FloquetMap& map, StateVector initial, int n_periods,
                               std::uint64_t realization = 0);

TrajectoryResult run_trajectory(const HamiltonianSpec& hamiltonian, const DriveSpec& drive,
                                InitialStateKind initial_state, PropagatorOptions options = {});

struct EnsembleResult {
  std::vector<TrajectoryResult> realizations;
  std::vector<double> mean_series;
};

/// Independent kick-noise realizations (fresh eps_i per site, period and
/// realization). With noise_bound = 0 this is a single clean trajectory.
EnsembleResult run_noisy_ensemble(const HamiltonianSpec& hamiltonian, const DriveSpec& drive,
                                  InitialStateKind initial_state, int n_realizations,
                                  PropagatorOptions options = {}, int threads = 1);

/// Per-time-step mean that does not depend on the order of the series.
std::vector<double> ordered_mean(const std::vector<std::vector<double>>& series);

}  // namespace dtc
