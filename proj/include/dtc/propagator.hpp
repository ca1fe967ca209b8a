#pragma once

#include <array>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dtc/hamiltonian.hpp"
#include "dtc/krylov.hpp"

namespace dtc {

/// Kick and period parameters. Each site is rotated by
/// phi_i = pi (1/2 - eps_i) about z; eps_i = epsilon for a clean drive and
/// eps_i ~ U[0, noise_bound] (fresh every period) for a noisy one.
struct DriveSpec {
  double period_tau = 0.6;
  double epsilon = 0.08;
  double noise_bound = 0.0;
  int n_periods = 1000;
  std::uint64_t rng_seed = 0;

  bool noisy() const { return noise_bound > 0.0; }
  double drive_frequency() const { return 2.0 * std::numbers::pi / period_tau; }
};

/// Counter-based SplitMix64 stream: every draw is a pure function of
/// (seed, realization, period, site), so runs are reproducible regardless of
/// evaluation order or thread count.
class KickNoise {
 public:
  explicit KickNoise(std::uint64_t seed) : seed_(seed) {}

  /// Uniform in [0, 1).
  double uniform(std::uint64_t realization, std::uint64_t period, std::uint64_t site) const;

 private:
  std::uint64_t seed_;
};

/// Per-site kick angles for one period.
std::vector<double> kick_angles(int n_sites, const DriveSpec& drive, std::uint64_t period = 0,
                                std::uint64_t realization = 0);

/// Multiplies the amplitude of bitstring b by exp(-i sum_i phi_i s_i(b)).
void apply_kick(StateVector& state, std::span<const double> angles);

/// The diagonal of the kick, exp(-i sum_i phi_i s_i(b)) for every b.
std::vector<Complex> kick_diagonal(std::span<const double> angles);

enum class PropagationMethod {
  automatic,   // x_diagonal when h = 0, exact_eigen for N <= 10, else krylov
  x_diagonal,  // h = 0 only: phases in the sigma^x basis, O(N 2^N) per step
  exact_eigen, // dense per-parity-sector exp(-i H tau), N <= 12
  krylov,
};

struct PropagatorOptions {
  PropagationMethod method = PropagationMethod::automatic;
  double tolerance = 1e-10;
};

inline constexpr int kExactEigenMaxSites = 12;

struct StepReport {
  double norm_drift = 0.0;   // | ||psi|| - 1 | after the step, before any fix-up
  bool renormalized = false;
  int krylov_dim = 0;
};

/// exp(-i H0 tau) bound to one Hamiltonian and one period. Immutable after
/// construction and safe to share between threads.
class FreePropagator {
 public:
  FreePropagator(IsingHamiltonian hamiltonian, double tau, PropagatorOptions options = {});

  PropagationMethod method() const { return method_; }
  double tau() const { return tau_; }
  double tolerance() const { return tolerance_; }
  const IsingHamiltonian& hamiltonian() const { return hamiltonian_; }

  /// In place; renormalizes only when the drift exceeds 1e-12.
  StepReport apply(StateVector& state) const;

  /// Dense exp(-i H tau) on one parity sector; exact_eigen only.
  const Eigen::MatrixXcd& sector_propagator(int parity) const;
  std::span<const std::uint32_t> sector_indices(int parity) const;

 private:
  struct Sector {
    std::vector<std::uint32_t> indices;
    Eigen::MatrixXcd propagator;
  };

  IsingHamiltonian hamiltonian_;
  double tau_;
  double tolerance_;
  PropagationMethod method_;
  std::vector<Complex> x_phases_;
  std::array<Sector, 2> sectors_;  // [0]: even, [1]: odd
};

/// Convenience: exp(-i H tau) |psi> with a freshly built propagator.
StateVector evolve_free(StateVector state, const IsingHamiltonian& hamiltonian, double tau,
                        PropagatorOptions options = {});

/// One drive period: free evolution for tau, then the kick.
class FloquetMap {
 public:
  FloquetMap(const IsingHamiltonian& hamiltonian, DriveSpec drive, PropagatorOptions options = {});

  const FreePropagator& free() const { return free_; }
  const DriveSpec& drive() const { return drive_; }
  int n_sites() const { return free_.hamiltonian().n_sites(); }

  /// Applies period `period` of realization `realization`; the indices only
  /// matter for noisy drives.
  StepReport step(StateVector& state, std::uint64_t period = 0, std::uint64_t realization = 0) const;

 private:
  FreePropagator free_;
  DriveSpec drive_;
  std::vector<double> clean_angles_;
};

StateVector floquet_step(StateVector state, const FloquetMap& map, std::uint64_t period = 0,
                         std::uint64_t realization = 0);

/// Dense one-period unitary; column j is one step applied to basis state j.
/// Requires N <= 12 and a clean drive.
Eigen::MatrixXcd build_floquet_matrix(const IsingHamiltonian& hamiltonian, const DriveSpec& drive,
                                      PropagatorOptions options = {});

}  // namespace dtc
