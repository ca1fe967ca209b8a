#include "dtc/propagator.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace dtc {

namespace {

constexpr double kRenormalizeThreshold = 1e-12;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

int sector_slot(int parity) {
  if (parity != 1 && parity != -1) {
    throw std::invalid_argument("parity must be +1 or -1");
  }
  return parity == 1 ? 0 : 1;
}

PropagationMethod resolve_method(const IsingHamiltonian& h, PropagationMethod requested) {
  switch (requested) {
    case PropagationMethod::automatic:
      if (h.field() == 0.0) {
        return PropagationMethod::x_diagonal;
      }
      return h.n_sites() <= 10 ? PropagationMethod::exact_eigen : PropagationMethod::krylov;
    case PropagationMethod::x_diagonal:
      if (h.field() != 0.0) {
        throw std::invalid_argument("x_diagonal propagation requires h = 0");
      }
      return requested;
    case PropagationMethod::exact_eigen:
      if (h.n_sites() > kExactEigenMaxSites) {
        throw std::length_error("exact_eigen propagation is capped at N = " +
                                std::to_string(kExactEigenMaxSites));
      }
      return requested;
    case PropagationMethod::krylov:
      return requested;
  }
  return requested;
}

// exp(-i sum_i phi_i s_i(b)) factorized over the low and high halves of b.
class KickPhaseTable {
 public:
  KickPhaseTable(std::span<const double> angles) : low_bits_(static_cast<int>(angles.size()) / 2) {
    const int n = static_cast<int>(angles.size());
    low_ = half_table(angles.subspan(0, low_bits_));
    high_ = half_table(angles.subspan(low_bits_, n - low_bits_));
  }

  Complex operator()(std::uint64_t b) const {
    return low_[b & ((std::uint64_t{1} << low_bits_) - 1)] * high_[b >> low_bits_];
  }

 private:
  static std::vector<Complex> half_table(std::span<const double> angles) {
    const std::size_t size = std::size_t{1} << angles.size();
    std::vector<Complex> table(size);
    for (std::size_t b = 0; b < size; ++b) {
      double phase = 0.0;
      for (std::size_t i = 0; i < angles.size(); ++i) {
        phase += angles[i] * z_sign(b, static_cast<int>(i));
      }
      table[b] = std::polar(1.0, -phase);
    }
    return table;
  }

  int low_bits_;
  std::vector<Complex> low_;
  std::vector<Complex> high_;
};

}  // namespace

double KickNoise::uniform(std::uint64_t realization, std::uint64_t period, std::uint64_t site) const {
  std::uint64_t x = splitmix64(seed_);
  x = splitmix64(x ^ realization);
  x = splitmix64(x ^ period);
  x = splitmix64(x ^ site);
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

std::vector<double> kick_angles(int n_sites, const DriveSpec& drive, std::uint64_t period,
                                std::uint64_t realization) {
  if (drive.noise_bound < 0.0) {
    throw std::invalid_argument("noise bound must be >= 0");
  }
  std::vector<double> angles(n_sites);
  const KickNoise noise(drive.rng_seed);
  for (int i = 0; i < n_sites; ++i) {
    const double eps = drive.noisy() ? drive.noise_bound * noise.uniform(realization, period, i)
                                     : drive.epsilon;
    angles[i] = std::numbers::pi * (0.5 - eps);
  }
  return angles;
}

void apply_kick(StateVector& state, std::span<const double> angles) {
  if (static_cast<int>(angles.size()) != state.n_sites()) {
    throw std::invalid_argument("apply_kick: need one angle per site (got " +
                                std::to_string(angles.size()) + " for " +
                                std::to_string(state.n_sites()) + " sites)");
  }
  const KickPhaseTable table(angles);
  auto amps = state.amplitudes();
  for (std::uint64_t b = 0; b < amps.size(); ++b) {
    amps[b] *= table(b);
  }
}

std::vector<Complex> kick_diagonal(std::span<const double> angles) {
  if (angles.empty() || angles.size() > static_cast<std::size_t>(kMaxSites)) {
    throw std::invalid_argument("kick_diagonal: bad site count");
  }
  const KickPhaseTable table(angles);
  std::vector<Complex> diagonal(std::size_t{1} << angles.size());
  for (std::uint64_t b = 0; b < diagonal.size(); ++b) {
    diagonal[b] = table(b);
  }
  return diagonal;
}

FreePropagator::FreePropagator(IsingHamiltonian hamiltonian, double tau, PropagatorOptions options)
    : hamiltonian_(std::move(hamiltonian)),
      tau_(tau),
      tolerance_(options.tolerance),
      method_(resolve_method(hamiltonian_, options.method)) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) {
    throw std::invalid_argument("free evolution time must be finite and >= 0");
  }
  if (!(tolerance_ > 0.0)) {
    throw std::invalid_argument("propagator tolerance must be > 0");
  }

  if (method_ == PropagationMethod::x_diagonal) {
    const auto energies = hamiltonian_.x_energies();
    x_phases_.resize(energies.size());
    for (std::size_t c = 0; c < energies.size(); ++c) {
      x_phases_[c] = std::polar(1.0, -energies[c] * tau_);
    }
  } else if (method_ == PropagationMethod::exact_eigen) {
    for (int parity : {1, -1}) {
      Sector& sector = sectors_[sector_slot(parity)];
      sector.indices = parity_sector(hamiltonian_.n_sites(), parity);
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hamiltonian_.sector_matrix(parity));
      const Eigen::MatrixXcd v = eig.eigenvectors().cast<Complex>();
      Eigen::VectorXcd phases(eig.eigenvalues().size());
      for (Eigen::Index k = 0; k < phases.size(); ++k) {
        phases[k] = std::polar(1.0, -eig.eigenvalues()[k] * tau_);
      }
      sector.propagator = v * phases.asDiagonal() * v.transpose();
    }
  }
}

const Eigen::MatrixXcd& FreePropagator::sector_propagator(int parity) const {
  if (method_ != PropagationMethod::exact_eigen) {
    throw std::logic_error("sector propagators exist only for exact_eigen");
  }
  return sectors_[sector_slot(parity)].propagator;
}

std::span<const std::uint32_t> FreePropagator::sector_indices(int parity) const {
  if (method_ != PropagationMethod::exact_eigen) {
    throw std::logic_error("sector indices exist only for exact_eigen");
  }
  return sectors_[sector_slot(parity)].indices;
}

StepReport FreePropagator::apply(StateVector& state) const {
  if (state.dim() != hamiltonian_.dim()) {
    throw std::invalid_argument("state and Hamiltonian sizes differ");
  }
  StepReport report;
  auto amps = state.amplitudes();
  switch (method_) {
    case PropagationMethod::x_diagonal:
      walsh_hadamard(amps, state.n_sites());
      for (std::size_t c = 0; c < amps.size(); ++c) {
        amps[c] *= x_phases_[c];
      }
      walsh_hadamard(amps, state.n_sites());
      break;
    case PropagationMethod::exact_eigen:
      for (const Sector& sector : sectors_) {
        const auto n = static_cast<Eigen::Index>(sector.indices.size());
        Eigen::VectorXcd x(n);
        for (Eigen::Index k = 0; k < n; ++k) {
          x[k] = amps[sector.indices[k]];
        }
        const Eigen::VectorXcd y = sector.propagator * x;
        for (Eigen::Index k = 0; k < n; ++k) {
          amps[sector.indices[k]] = y[k];
        }
      }
      break;
    case PropagationMethod::krylov:
      report.krylov_dim = krylov::expm_apply(hamiltonian_, tau_, amps, tolerance_).krylov_dim;
      break;
    case PropagationMethod::automatic:
      throw std::logic_error("unresolved propagation method");
  }
  const double norm = state.norm();
  report.norm_drift = std::abs(norm - 1.0);
  if (report.norm_drift > kRenormalizeThreshold) {
    state.normalize();
    report.renormalized = true;
  }
  return report;
}

StateVector evolve_free(StateVector state, const IsingHamiltonian& hamiltonian, double tau,
                        PropagatorOptions options) {
  const FreePropagator propagator(hamiltonian, tau, options);
  propagator.apply(state);
  return state;
}

FloquetMap::FloquetMap(const IsingHamiltonian& hamiltonian, DriveSpec drive, PropagatorOptions options)
    : free_(hamiltonian, drive.period_tau, options), drive_(drive) {
  if (drive_.n_periods < 0) {
    throw std::invalid_argument("period count must be >= 0");
  }
  clean_angles_ = kick_angles(hamiltonian.n_sites(), drive_);
}

StepReport FloquetMap::step(StateVector& state, std::uint64_t period, std::uint64_t realization) const {
  StepReport report = free_.apply(state);
  if (drive_.noisy()) {
    apply_kick(state, kick_angles(n_sites(), drive_, period, realization));
  } else {
    apply_kick(state, clean_angles_);
  }
  return report;
}

StateVector floquet_step(StateVector state, const FloquetMap& map, std::uint64_t period,
                         std::uint64_t realization) {
  map.step(state, period, realization);
  return state;
}

Eigen::MatrixXcd build_floquet_matrix(const IsingHamiltonian& hamiltonian, const DriveSpec& drive,
                                      PropagatorOptions options) {
  if (hamiltonian.n_sites() > kExactEigenMaxSites) {
    throw std::length_error("dense Floquet operator is capped at N = " +
                            std::to_string(kExactEigenMaxSites));
  }
  if (drive.noisy()) {
    throw std::invalid_argument("dense Floquet operator needs a deterministic (noise-free) drive");
  }
  if (options.method == PropagationMethod::automatic && hamiltonian.field() != 0.0) {
    // Every column is needed, so the dense route always wins here.
    options.method = PropagationMethod::exact_eigen;
  }
  const FloquetMap map(hamiltonian, drive, options);
  const auto dim = static_cast<Eigen::Index>(hamiltonian.dim());
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(dim, dim);

  if (map.free().method() == PropagationMethod::exact_eigen) {
    // U = K U0 assembled directly from the sector blocks.
    const std::vector<Complex> phases = kick_diagonal(kick_angles(hamiltonian.n_sites(), drive));
    for (int parity : {1, -1}) {
      const auto idx = map.free().sector_indices(parity);
      const Eigen::MatrixXcd& block = map.free().sector_propagator(parity);
      for (std::size_t col = 0; col < idx.size(); ++col) {
        for (std::size_t row = 0; row < idx.size(); ++row) {
          u(idx[row], idx[col]) = phases[idx[row]] * block(row, col);
        }
      }
    }
    return u;
  }

  for (Eigen::Index j = 0; j < dim; ++j) {
    StateVector column = StateVector::basis_state(hamiltonian.n_sites(), j);
    map.step(column);
    for (Eigen::Index i = 0; i < dim; ++i) {
      u(i, j) = column[i];
    }
  }
  return u;
}

}  // namespace dtc
