#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dtc/hamiltonian.hpp"
#include "dtc/linear_fit.hpp"
#include "dtc/propagator.hpp"

namespace dtc {

/// Quasi-energies mu of U|a> = exp(-i mu tau)|a>, folded into (-pi/tau, pi/tau]
/// and sorted, with the parity P = prod sz of each eigenstate.
struct FloquetEigensystem {
  double tau = 0.0;
  std::vector<double> quasi_energies;
  std::vector<int> parities;
  std::vector<double> parity_expectations;  // <a|P|a>
  std::size_t hilbert_dim = 0;
  double unit_circle_error = 0.0;  // max ||lambda| - 1|
  double parity_commutator = 0.0;  // max |(UP - PU)_ij|
  bool parity_blocks = false;      // diagonalized sector by sector
  bool parity_mixing = false;      // some |<a|P|a>| <= 0.99 after cluster rotation
};

/// Folds mu into (-pi/tau, pi/tau].
double fold_quasi_energy(double mu, double tau);

/// Throws unless U is unitary to 1e-9. When U commutes with P the two parity
/// blocks are diagonalized separately; otherwise the full matrix is, and
/// near-degenerate clusters are rotated to definite parity.
FloquetEigensystem floquet_eigensystem(const Eigen::MatrixXcd& u, double tau);

/// Zero gaps are floored here before taking logs.
inline constexpr double kGapFloor = 1e-15;

struct PairingGaps {
  std::vector<double> delta_0;   // mu_{a+1} - mu_a, cyclic
  std::vector<double> delta_pi;  // mu_{a+D/2} - (mu_a + pi/tau), wrapped
  double mean_log_delta_0 = 0.0;
  double mean_log_delta_pi = 0.0;
};

PairingGaps pairing_gaps(const FloquetEigensystem& eigensystem);

struct PairingPoint {
  double epsilon = 0.0;
  int n_sites = 0;
  double mean_log_delta_0 = 0.0;
  double mean_log_delta_pi = 0.0;
};

struct PairingSlope {
  double epsilon = 0.0;
  LinearFit fit_0;   // <log Delta_0> = a + b0 log N
  LinearFit fit_pi;  // <log Delta_pi> = a + b_pi log N
  bool pinned = false;          // Delta_pi at the numerical floor for every N
  bool dtc_compatible = false;  // b_pi < b0 and not pinned
  double slope_b0() const { return fit_0.slope; }
  double slope_bpi() const { return fit_pi.slope; }
};

/// Fits <log Delta> = a + b log N for each epsilon.
PairingSlope fit_pairing_slope(double epsilon, std::span<const PairingPoint> points);

struct PairingScaling {
  std::vector<PairingPoint> points;  // epsilon-major, then N
  std::vector<PairingSlope> slopes;  // one per epsilon
};

/// Builds and diagonalizes the Floquet operator for every (epsilon, N);
/// `hamiltonian` supplies J, h, alpha and `drive` supplies tau.
PairingScaling pairing_size_scaling(const HamiltonianSpec& hamiltonian, const DriveSpec& drive,
                                    std::span<const int> sizes, std::span<const double> epsilons,
                                    PropagatorOptions options = {}, int threads = 1);

}  // namespace dtc
