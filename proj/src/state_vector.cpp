#include "dtc/state_vector.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dtc {

namespace {

std::size_t checked_dim(int n_sites) {
  if (n_sites < 1) {
    throw std::invalid_argument("state vector needs at least one site");
  }
  if (n_sites > kMaxSites) {
    throw std::length_error("state vector with " + std::to_string(n_sites) +
                            " sites exceeds the cap of " + std::to_string(kMaxSites));
  }
  return std::size_t{1} << n_sites;
}

}  // namespace

StateVector::StateVector(int n_sites) : n_sites_(n_sites), amplitudes_(checked_dim(n_sites)) {
  amplitudes_[0] = 1.0;
}

StateVector::StateVector(int n_sites, std::vector<Complex> amplitudes)
    : n_sites_(n_sites), amplitudes_(std::move(amplitudes)) {}

StateVector StateVector::basis_state(int n_sites, std::uint64_t index) {
  const std::size_t dim = checked_dim(n_sites);
  if (index >= dim) {
    throw std::out_of_range("basis index out of range");
  }
  std::vector<Complex> amps(dim);
  amps[index] = 1.0;
  return StateVector(n_sites, std::move(amps));
}

StateVector StateVector::from_amplitudes(int n_sites, std::vector<Complex> amplitudes) {
  if (amplitudes.size() != checked_dim(n_sites)) {
    throw std::invalid_argument("amplitude count must be 2^n_sites");
  }
  StateVector state(n_sites, std::move(amplitudes));
  if (state.norm() == 0.0) {
    throw std::invalid_argument("cannot normalize the zero vector");
  }
  state.normalize();
  return state;
}

double StateVector::norm() const {
  double sum = 0.0;
  for (const Complex& a : amplitudes_) {
    sum += std::norm(a);
  }
  return std::sqrt(sum);
}

void StateVector::normalize() {
  const double inv = 1.0 / norm();
  for (Complex& a : amplitudes_) {
    a *= inv;
  }
}

Complex StateVector::inner(const StateVector& other) const {
  if (other.dim() != dim()) {
    throw std::invalid_argument("inner product of states with different dimensions");
  }
  Complex sum = 0.0;
  for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
    sum += std::conj(amplitudes_[i]) * other.amplitudes_[i];
  }
  return sum;
}

std::vector<std::uint32_t> parity_sector(int n_sites, int parity) {
  const std::size_t dim = checked_dim(n_sites);
  std::vector<std::uint32_t> indices;
  indices.reserve(dim / 2);
  for (std::uint32_t b = 0; b < dim; ++b) {
    if (parity_of(b) == parity) {
      indices.push_back(b);
    }
  }
  return indices;
}

void walsh_hadamard(std::span<Complex> amplitudes, int n_sites) {
  const std::size_t dim = amplitudes.size();
  if (dim != (std::size_t{1} << n_sites)) {
    throw std::invalid_argument("walsh_hadamard: length must be 2^n_sites");
  }
  for (std::size_t half = 1; half < dim; half <<= 1) {
    for (std::size_t block = 0; block < dim; block += 2 * half) {
      for (std::size_t k = block; k < block + half; ++k) {
        const Complex a = amplitudes[k];
        const Complex b = amplitudes[k + half];
        amplitudes[k] = a + b;
        amplitudes[k + half] = a - b;
      }
    }
  }
  const double scale = std::pow(2.0, -0.5 * n_sites);
  for (Complex& a : amplitudes) {
    a *= scale;
  }
}

}  // namespace dtc
