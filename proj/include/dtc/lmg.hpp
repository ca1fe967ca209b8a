#pragma once

#include <vector>

#include <Eigen/Dense>

namespace dtc {

inline constexpr int kMaxDickeSites = 1000;

/// Maximal-spin sector S = N/2 of the LMG model, quantized along x. Basis
/// index k holds |S, M = S - k>, so index 0 is the x-polarized state |R>.
/// In this basis S^x is diagonal and S^z = (J+ + J-)/2 is tridiagonal.
class DickeSector {
 public:
  DickeSector(int n_sites, double field);

  int n_sites() const { return n_sites_; }
  double total_spin() const { return 0.5 * n_sites_; }
  int dim() const { return n_sites_ + 1; }
  double field() const { return field_; }

  const Eigen::VectorXd& sx() const { return sx_; }
  const Eigen::MatrixXd& sz() const { return sz_; }
  /// -(S^x)^2 / N - h S^z
  const Eigen::MatrixXd& hamiltonian() const { return hamiltonian_; }
  /// Ascending spectrum of the Hamiltonian.
  const Eigen::VectorXd& energies() const { return energies_; }

  /// E2 - E0: the one-magnon excitation above the (quasi-)degenerate pair.
  double omega_1() const;

 private:
  int n_sites_;
  double field_;
  Eigen::VectorXd sx_;
  Eigen::MatrixXd sz_;
  Eigen::MatrixXd hamiltonian_;
  Eigen::VectorXd energies_;
};

double dicke_omega_1(int n_sites, double field);

/// Exact kicked evolution from |S, S>: free evolution for tau, then
/// exp(-2i phi S^z) with phi = pi (1/2 - epsilon). Entry n is m = 2<S^x>/N
/// after n periods, n = 0..n_periods-1.
std::vector<double> lmg_exact_trajectory(int n_sites, double field, double tau, double epsilon,
                                         int n_periods);

struct LmgPerturbative {
  std::vector<double> mx;
  double prefactor = 0.0;  // C = 2 pi^2 eps^2 / (1 - cos w1 tau)
  double validity = 0.0;   // eps^2 pi^2 N / (1 - cos w1 tau), should be << 1
  bool validity_warning = false;
};

/// Above this the first-order closed form is flagged (but still computed).
inline constexpr double kLmgValidityLimit = 0.1;

/// m_n = (-1)^n (1 - C) + (C/2) [cos n(pi - w1 tau) + cos n(pi + w1 tau)], n = 0..n_periods-1.
LmgPerturbative lmg_perturbative_mx(int n_sites, double epsilon, double tau, double omega_1, int n_periods);

}  // namespace dtc
