#include "dtc/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dtc/krylov.hpp"
#include "dtc/parallel.hpp"

namespace dtc {

std::string_view to_string(InitialStateKind kind) {
  switch (kind) {
    case InitialStateKind::product_right:
      return "product_right";
    case InitialStateKind::product_left:
      return "product_left";
    case InitialStateKind::symmetry_broken_gs:
      return "symmetry_broken_gs";
  }
  return "unknown";
}

InitialStateKind initial_state_from_string(std::string_view name) {
  for (auto kind : {InitialStateKind::product_right, InitialStateKind::product_left,
                    InitialStateKind::symmetry_broken_gs}) {
    if (name == to_string(kind)) {
      return kind;
    }
  }
  throw std::invalid_argument("unknown initial state '" + std::string(name) + "'");
}

GroundDoublet ground_doublet(const IsingHamiltonian& hamiltonian) {
  const int n = hamiltonian.n_sites();
  // Even and odd parts of |R> are the h = 0 cat states; they seed each sector.
  const StateVector right = product_state_x(n, XDirection::right);
  auto sector_ground = [&](int parity) {
    std::vector<Complex> seed(right.dim());
    for (std::uint64_t b = 0; b < seed.size(); ++b) {
      seed[b] = parity_of(b) == parity ? right[b] : Complex{};
    }
    krylov::Eigenpair pair = krylov::lowest_eigenpair(hamiltonian, seed);
    return std::make_pair(pair.energy, StateVector::from_amplitudes(n, std::move(pair.vector)));
  };
  auto [e_even, v_even] = sector_ground(1);
  auto [e_odd, v_odd] = sector_ground(-1);
  return GroundDoublet{e_even, e_odd, std::move(v_even), std::move(v_odd)};
}

StateVector prepare_initial_state(const HamiltonianSpec& spec, InitialStateKind kind) {
  switch (kind) {
    case InitialStateKind::product_right:
      return product_state_x(spec.n_sites, XDirection::right);
    case InitialStateKind::product_left:
      return product_state_x(spec.n_sites, XDirection::left);
    case InitialStateKind::symmetry_broken_gs:
      break;
  }

  if (spec.field == 0.0) {
    return product_state_x(spec.n_sites, XDirection::right);
  }
  if (!(spec.coupling > 0.0)) {
    throw std::invalid_argument("symmetry-broken ground state needs J > 0");
  }
  const double ratio = spec.field / spec.coupling;
  if (ratio < 0.0 || ratio >= 1.0) {
    throw std::invalid_argument("symmetry-broken ground state needs 0 <= h/J < 1 (got " +
                                std::to_string(ratio) + ")");
  }

  const IsingHamiltonian hamiltonian = build_hamiltonian(spec);
  const GroundDoublet doublet = ground_doublet(hamiltonian);

  // Sum sigma^x maps one parity sector onto the other, so m^x of the
  // combination is s * Re<E0|X|E1> / N.
  std::vector<Complex> sum(doublet.even_state.dim());
  for (std::size_t b = 0; b < sum.size(); ++b) {
    sum[b] = doublet.even_state[b] + doublet.odd_state[b];
  }
  const double cross = magnetization_x(StateVector::from_amplitudes(spec.n_sites, sum));
  if (std::abs(cross) < 1e-8) {
    throw std::runtime_error("cannot resolve the ground doublet: <E0|X|E1> vanishes");
  }
  const double sign = cross > 0.0 ? 1.0 : -1.0;
  for (std::size_t b = 0; b < sum.size(); ++b) {
    sum[b] = doublet.even_state[b] + sign * doublet.odd_state[b];
  }
  return StateVector::from_amplitudes(spec.n_sites, std::move(sum));
}

TrajectoryResult evolve_series(const FloquetMap& map, StateVector state, int n_periods,
                               std::uint64_t realization) {
  if (n_periods < 0) {
    throw std::invalid_argument("period count must be >= 0");
  }
  TrajectoryResult result;
  result.drive = map.drive();
  result.realization = realization;
  result.mx_series.reserve(n_periods);
  for (int n = 0; n < n_periods; ++n) {
    if (n > 0) {
      const StepReport report = map.step(state, static_cast<std::uint64_t>(n - 1), realization);
      result.norm_drift = std::max(result.norm_drift, report.norm_drift);
      result.renormalizations += report.renormalized ? 1 : 0;
    }
    result.mx_series.push_back(magnetization_x(state));
  }
  return result;
}

TrajectoryResult run_trajectory(const HamiltonianSpec& hamiltonian, const DriveSpec& drive,
                                InitialStateKind initial_state, PropagatorOptions options) {
  const FloquetMap map(build_hamiltonian(hamiltonian), drive, options);
  TrajectoryResult result =
      evolve_series(map, prepare_initial_state(hamiltonian, initial_state), drive.n_periods);
  result.hamiltonian = hamiltonian;
  result.initial_state = initial_state;
  return result;
}

std::vector<double> ordered_mean(const std::vector<std::vector<double>>& series) {
  if (series.empty()) {
    return {};
  }
  const std::size_t length = series.front().size();
  std::vector<double> mean(length);
  std::vector<double> column(series.size());
  for (std::size_t n = 0; n < length; ++n) {
    for (std::size_t r = 0; r < series.size(); ++r) {
      if (series[r].size() != length) {
        throw std::invalid_argument("ordered_mean: series lengths differ");
      }
      column[r] = series[r][n];
    }
    std::sort(column.begin(), column.end());
    double sum = 0.0;
    for (double v : column) {
      sum += v;
    }
    mean[n] = sum / static_cast<double>(series.size());
  }
  return mean;
}

EnsembleResult run_noisy_ensemble(const HamiltonianSpec& hamiltonian, const DriveSpec& drive,
                                  InitialStateKind initial_state, int n_realizations,
                                  PropagatorOptions options, int threads) {
  if (n_realizations < 1) {
    throw std::invalid_argument("need at least one realization");
  }
  const FloquetMap map(build_hamiltonian(hamiltonian), drive, options);
  const StateVector initial = prepare_initial_state(hamiltonian, initial_state);
  // A clean drive has only one distinct realization.
  const int count = drive.noisy() ? n_realizations : 1;

  EnsembleResult ensemble;
  ensemble.realizations.resize(count);
  parallel_for(count, threads, [&](std::size_t r) {
    TrajectoryResult result = evolve_series(map, initial, drive.n_periods, r);
    result.hamiltonian = hamiltonian;
    result.initial_state = initial_state;
    ensemble.realizations[r] = std::move(result);
  });

  std::vector<std::vector<double>> series;
  series.reserve(count);
  for (const auto& r : ensemble.realizations) {
    series.push_back(r.mx_series);
  }
  ensemble.mean_series = ordered_mean(series);
  return ensemble;
}

}  // namespace dtc
