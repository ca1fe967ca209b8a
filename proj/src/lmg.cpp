#include "dtc/lmg.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace dtc {

namespace {

constexpr double kPi = std::numbers::pi;

void check_size(int n_sites) {
  if (n_sites < 2) {
    throw std::invalid_argument("LMG sector needs N >= 2");
  }
  if (n_sites > kMaxDickeSites) {
    throw std::length_error("LMG sector capped at N = " + std::to_string(kMaxDickeSites));
  }
}

// V diag(exp(-i t w)) V^T for a real symmetric matrix with eigenpairs (w, V).
Eigen::MatrixXcd unitary_from(const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& solver, double t) {
  const Eigen::VectorXcd phases =
      (solver.eigenvalues().cast<std::complex<double>>() * std::complex<double>(0.0, -t)).array().exp();
  const Eigen::MatrixXcd v = solver.eigenvectors().cast<std::complex<double>>();
  return v * phases.asDiagonal() * v.transpose();
}

}  // namespace

DickeSector::DickeSector(int n_sites, double field) : n_sites_(n_sites), field_(field) {
  check_size(n_sites);
  if (!std::isfinite(field)) {
    throw std::invalid_argument("LMG field must be finite");
  }
  const int d = dim();
  const double s = total_spin();
  sx_.resize(d);
  sz_ = Eigen::MatrixXd::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    const double m = s - k;
    sx_(k) = m;
    if (k + 1 < d) {
      // <M|S^z|M-1> = sqrt(S(S+1) - M(M-1)) / 2
      const double element = 0.5 * std::sqrt(s * (s + 1.0) - m * (m - 1.0));
      sz_(k, k + 1) = element;
      sz_(k + 1, k) = element;
    }
  }
  hamiltonian_ = -field * sz_;
  hamiltonian_.diagonal() -= sx_.cwiseAbs2() / static_cast<double>(n_sites);
  energies_ = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(hamiltonian_, Eigen::EigenvaluesOnly).eigenvalues();
}

double DickeSector::omega_1() const { return energies_(2) - energies_(0); }

double dicke_omega_1(int n_sites, double field) { return DickeSector(n_sites, field).omega_1(); }

std::vector<double> lmg_exact_trajectory(int n_sites, double field, double tau, double epsilon,
                                         int n_periods) {
  if (n_periods < 0) {
    throw std::invalid_argument("period count must be >= 0");
  }
  const DickeSector sector(n_sites, field);
  const double phi = kPi * (0.5 - epsilon);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> h_solver(sector.hamiltonian());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> kick_solver(sector.sz());
  const Eigen::MatrixXcd period = unitary_from(kick_solver, 2.0 * phi) * unitary_from(h_solver, tau);

  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(sector.dim());
  psi(0) = 1.0;
  const double scale = 2.0 / static_cast<double>(n_sites);
  std::vector<double> mx;
  mx.reserve(n_periods);
  for (int n = 0; n < n_periods; ++n) {
    if (n > 0) {
      psi = period * psi;
    }
    mx.push_back(scale * psi.cwiseAbs2().dot(sector.sx()));
  }
  return mx;
}

LmgPerturbative lmg_perturbative_mx(int n_sites, double epsilon, double tau, double omega_1,
                                    int n_periods) {
  check_size(n_sites);
  if (n_periods < 0) {
    throw std::invalid_argument("period count must be >= 0");
  }
  const double w = omega_1 * tau;
  const double denominator = 1.0 - std::cos(w);
  if (!(denominator > 0.0)) {
    throw std::invalid_argument("lmg_perturbative_mx: omega_1 tau must not be a multiple of 2 pi");
  }
  LmgPerturbative out;
  out.prefactor = 2.0 * kPi * kPi * epsilon * epsilon / denominator;
  out.validity = epsilon * epsilon * kPi * kPi * n_sites / denominator;
  out.validity_warning = out.validity > kLmgValidityLimit;
  out.mx.reserve(n_periods);
  const double c = out.prefactor;
  for (int n = 0; n < n_periods; ++n) {
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    out.mx.push_back(sign * (1.0 - c) + 0.5 * c * (std::cos(n * (kPi - w)) + std::cos(n * (kPi + w))));
  }
  return out;
}

}  // namespace dtc
