#include "dtc/hamiltonian.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dtc {

IsingHamiltonian::IsingHamiltonian(int n_sites, std::vector<Bond> bonds, double field)
    : n_sites_(n_sites), bonds_(std::move(bonds)), field_(field) {
  if (n_sites < 1) {
    throw std::invalid_argument("Ising chain needs at least one site");
  }
  if (n_sites > kMaxSites) {
    throw std::length_error("Ising chain with " + std::to_string(n_sites) +
                            " sites exceeds the cap of " + std::to_string(kMaxSites));
  }
  for (const Bond& b : bonds_) {
    if (b.i < 0 || b.j < 0 || b.i >= n_sites || b.j >= n_sites || b.i == b.j) {
      throw std::invalid_argument("bond sites out of range");
    }
  }

  x_energies_.assign(dim(), 0.0);
  for (const Bond& b : bonds_) {
    for (std::uint64_t c = 0; c < dim(); ++c) {
      // Aligned x spins give -J, anti-aligned +J.
      x_energies_[c] += (((c >> b.i) ^ (c >> b.j)) & 1U) ? b.strength : -b.strength;
    }
  }
}

void IsingHamiltonian::apply(std::span<const Complex> in, std::span<Complex> out) const {
  const std::size_t d = dim();
  if (in.size() != d || out.size() != d) {
    throw std::invalid_argument("IsingHamiltonian::apply: dimension mismatch");
  }
  for (std::uint64_t b = 0; b < d; ++b) {
    const int up_minus_down = n_sites_ - 2 * std::popcount(b);
    out[b] = -field_ * up_minus_down * in[b];
  }
  for (const Bond& bond : bonds_) {
    const std::uint64_t flip = site_mask(bond.i) | site_mask(bond.j);
    for (std::uint64_t b = 0; b < d; ++b) {
      out[b] -= bond.strength * in[b ^ flip];
    }
  }
}

std::vector<Complex> IsingHamiltonian::apply(const StateVector& state) const {
  std::vector<Complex> out(dim());
  apply(state.amplitudes(), out);
  return out;
}

double IsingHamiltonian::expectation(const StateVector& state) const {
  const std::vector<Complex> out = apply(state);
  Complex sum = 0.0;
  for (std::size_t b = 0; b < out.size(); ++b) {
    sum += std::conj(state[b]) * out[b];
  }
  return sum.real();
}

double IsingHamiltonian::norm_bound() const {
  double bound = std::abs(field_) * n_sites_;
  for (const Bond& b : bonds_) {
    bound += std::abs(b.strength);
  }
  return bound;
}

Eigen::MatrixXd IsingHamiltonian::sector_matrix(int parity) const {
  const std::vector<std::uint32_t> sector = parity_sector(n_sites_, parity);
  std::vector<std::int64_t> position(dim(), -1);
  for (std::size_t k = 0; k < sector.size(); ++k) {
    position[sector[k]] = static_cast<std::int64_t>(k);
  }
  const auto n = static_cast<Eigen::Index>(sector.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const std::uint64_t b = sector[k];
    h(k, k) = -field_ * (n_sites_ - 2 * std::popcount(b));
    for (const Bond& bond : bonds_) {
      const std::uint64_t partner = b ^ site_mask(bond.i) ^ site_mask(bond.j);
      h(position[partner], k) -= bond.strength;
    }
  }
  return h;
}

IsingHamiltonian build_hamiltonian(const HamiltonianSpec& spec) {
  if (spec.n_sites < 2) {
    throw std::invalid_argument("n_sites must be >= 2");
  }
  if (spec.n_sites > kMaxSites) {
    throw std::length_error("n_sites = " + std::to_string(spec.n_sites) +
                            " exceeds the state-vector cap of " + std::to_string(kMaxSites));
  }
  if (!(spec.range_exponent > 0.0)) {
    throw std::invalid_argument("range exponent alpha must be > 0");
  }
  if (!std::isfinite(spec.coupling) || !std::isfinite(spec.field)) {
    throw std::invalid_argument("coupling and field must be finite");
  }

  std::vector<Bond> bonds;
  if (spec.nearest_neighbour()) {
    for (int i = 0; i + 1 < spec.n_sites; ++i) {
      bonds.push_back({i, i + 1, spec.coupling});
    }
  } else {
    for (int i = 0; i < spec.n_sites; ++i) {
      for (int j = i + 1; j < spec.n_sites; ++j) {
        bonds.push_back({i, j, spec.coupling / std::pow(double(j - i), spec.range_exponent)});
      }
    }
  }
  return IsingHamiltonian(spec.n_sites, std::move(bonds), spec.field);
}

StateVector product_state_x(int n_sites, XDirection direction) {
  StateVector state(n_sites);
  const double amp = std::pow(2.0, -0.5 * n_sites);
  auto amps = state.amplitudes();
  for (std::uint64_t b = 0; b < amps.size(); ++b) {
    amps[b] = direction == XDirection::right ? amp : amp * parity_of(b);
  }
  return state;
}

double magnetization_x(const StateVector& state) {
  const auto amps = state.amplitudes();
  double total = 0.0;
  for (int site = 0; site < state.n_sites(); ++site) {
    const std::uint64_t mask = site_mask(site);
    for (std::uint64_t b = 0; b < amps.size(); ++b) {
      if ((b & mask) == 0) {
        total += 2.0 * (std::conj(amps[b]) * amps[b | mask]).real();
      }
    }
  }
  return total / state.n_sites();
}

}  // namespace dtc
