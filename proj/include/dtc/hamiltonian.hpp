#pragma once

#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dtc/state_vector.hpp"

namespace dtc {

enum class Boundary { open };

/// Parameters of H0 = -J sum_{i<j} sx_i sx_j / |i-j|^alpha - h sum_i sz_i.
/// alpha = infinity keeps only nearest-neighbour bonds.
struct HamiltonianSpec {
  int n_sites = 10;
  double coupling = 1.0;
  double field = 0.0;
  double range_exponent = std::numeric_limits<double>::infinity();
  Boundary boundary = Boundary::open;

  bool nearest_neighbour() const { return range_exponent == std::numeric_limits<double>::infinity(); }
};

/// One -strength * sx_i sx_j term.
struct Bond {
  int i;
  int j;
  double strength;
};

/// Matrix-free transverse-field Ising operator. In the sigma^z basis the
/// bonds are pair flips and the field is diagonal; in the sigma^x product
/// basis the bonds are diagonal, which `x_energies()` tabulates.
class IsingHamiltonian {
 public:
  IsingHamiltonian(int n_sites, std::vector<Bond> bonds, double field);

  int n_sites() const { return n_sites_; }
  std::size_t dim() const { return std::size_t{1} << n_sites_; }
  const std::vector<Bond>& bonds() const { return bonds_; }
  double field() const { return field_; }

  /// Interaction energy of every sigma^x product state, indexed by x-bitstring.
  std::span<const double> x_energies() const { return x_energies_; }

  /// out = H in, sigma^z basis. `in` and `out` must not alias.
  void apply(std::span<const Complex> in, std::span<Complex> out) const;
  /// H|psi> as raw amplitudes (not a normalized state).
  std::vector<Complex> apply(const StateVector& state) const;

  double expectation(const StateVector& state) const;

  /// Upper bound on the spectral norm: sum |J_ij| + N |h|.
  double norm_bound() const;

  /// Dense real block of H restricted to a parity sector (see parity_sector).
  Eigen::MatrixXd sector_matrix(int parity) const;

 private:
  int n_sites_;
  std::vector<Bond> bonds_;
  double field_;
  std::vector<double> x_energies_;
};

/// Validates the spec and realizes H0 on the open chain.
IsingHamiltonian build_hamiltonian(const HamiltonianSpec& spec);

enum class XDirection { right, left };

/// |R> = prod |->> or |L> = prod |<-| in the sigma^z basis.
StateVector product_state_x(int n_sites, XDirection direction);

/// (1/N) <psi| sum_i sx_i |psi>, evaluated with bit flips.
double magnetization_x(const StateVector& state);

}  // namespace dtc
