#pragma once

#include <bit>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace dtc {

using Complex = std::complex<double>;

// Largest chain the state-vector code accepts: 2^20 amplitudes (16 MiB).
inline constexpr int kMaxSites = 20;

// Bit i of a basis index is site i (site 0 = least significant bit).
// In the sigma^z basis bit 0 is |up> and bit 1 is |down>; in the sigma^x
// product basis bit 0 is |->> and bit 1 is |<-|.
constexpr std::uint64_t site_mask(int site) { return std::uint64_t{1} << site; }

// sigma^z eigenvalue (+1 / -1) of `site` in basis state `index`.
constexpr int z_sign(std::uint64_t index, int site) { return (index >> site) & 1U ? -1 : 1; }

// (-1)^popcount: the eigenvalue of prod_i sigma^z_i on a sigma^z basis state.
constexpr int parity_of(std::uint64_t index) { return std::popcount(index) & 1 ? -1 : 1; }

/// Normalized amplitudes over the 2^N sigma^z product basis.
class StateVector {
 public:
  /// All spins up, |0...0>.
  explicit StateVector(int n_sites);

  static StateVector basis_state(int n_sites, std::uint64_t index);

  /// Takes ownership of raw amplitudes; the length must be 2^n_sites and the
  /// vector is renormalized (it must not be zero).
  static StateVector from_amplitudes(int n_sites, std::vector<Complex> amplitudes);

  int n_sites() const { return n_sites_; }
  std::size_t dim() const { return amplitudes_.size(); }

  std::span<Complex> amplitudes() { return amplitudes_; }
  std::span<const Complex> amplitudes() const { return amplitudes_; }
  Complex& operator[](std::size_t i) { return amplitudes_[i]; }
  const Complex& operator[](std::size_t i) const { return amplitudes_[i]; }

  double norm() const;
  void normalize();

  /// <this|other>
  Complex inner(const StateVector& other) const;

 private:
  StateVector(int n_sites, std::vector<Complex> amplitudes);

  int n_sites_;
  std::vector<Complex> amplitudes_;
};

/// Basis indices with the given parity (+1: even popcount, -1: odd), ascending.
std::vector<std::uint32_t> parity_sector(int n_sites, int parity);

/// In-place normalized Walsh-Hadamard transform over n_sites qubits. It maps
/// sigma^z-basis amplitudes to sigma^x-product-basis amplitudes and is its own
/// inverse.
void walsh_hadamard(std::span<Complex> amplitudes, int n_sites);

}  // namespace dtc
