#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "dtc/hamiltonian.hpp"

namespace dtc {

/// An iterative method could not reach the requested tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace krylov {

struct ExpmReport {
  int krylov_dim = 0;     // largest subspace used
  int substeps = 1;       // time slices the step was split into
  double error_estimate = 0.0;
};

/// psi <- exp(-i t H) psi by plain three-term Lanczos. The
/// subspace starts at 12 vectors and doubles until the a-posteriori error
/// estimate drops below `tolerance`; if the largest subspace is not enough the
/// step is halved. Throws ConvergenceError rather than truncating.
ExpmReport expm_apply(const IsingHamiltonian& h, double t, std::span<Complex> psi, double tolerance);

struct Eigenpair {
  double energy = 0.0;
  std::vector<Complex> vector;
  int restarts = 0;
};

/// Lowest eigenpair of H reachable from `start` (restarted Lanczos). A start
/// vector inside a symmetry sector stays in that sector.
Eigenpair lowest_eigenpair(const IsingHamiltonian& h, std::span<const Complex> start,
                           double tolerance = 1e-11);

}  // namespace krylov
}  // namespace dtc
