#include "dtc/floquet.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <cblas.h>
#include <lapacke.h>

#include "dtc/parallel.hpp"

namespace dtc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kUnitarityTolerance = 1e-9;
constexpr double kCommutatorTolerance = 1e-9;
constexpr double kClusterWidth = 1e-10;
// A spectrum whose mean log pi-gap sits below this is exactly paired.
const double kPinnedLogGap = std::log(1e-10);

int basis_parity(std::size_t b) { return (std::popcount(b) % 2 == 0) ? 1 : -1; }

struct Level {
  double mu;
  int parity;
  double expectation;
};

double max_unitarity_error(const Eigen::MatrixXcd& u) {
  const auto n = static_cast<blasint>(u.rows());
  Eigen::MatrixXcd g(u.rows(), u.cols());
  const Complex one(1.0, 0.0);
  const Complex zero(0.0, 0.0);
  cblas_zgemm(CblasColMajor, CblasConjTrans, CblasNoTrans, n, n, n, &one, u.data(), n, u.data(), n, &zero,
              g.data(), n);
  g.diagonal().array() -= 1.0;
  return g.cwiseAbs().maxCoeff();
}

struct GeneralEigen {
  Eigen::VectorXcd values;
  Eigen::MatrixXcd vectors;  // right eigenvectors, unit norm; empty unless requested
};

GeneralEigen general_eigen(Eigen::MatrixXcd a, bool want_vectors) {
  const auto n = static_cast<lapack_int>(a.rows());
  GeneralEigen out;
  out.values.resize(n);
  if (want_vectors) {
    out.vectors.resize(n, n);
  }
  const auto raw = [](Complex* p) { return reinterpret_cast<lapack_complex_double*>(p); };
  const lapack_int info =
      LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', want_vectors ? 'V' : 'N', n, raw(a.data()), n, raw(out.values.data()),
                    nullptr, 1, want_vectors ? raw(out.vectors.data()) : nullptr, want_vectors ? n : 1);
  if (info != 0) {
    throw std::runtime_error("floquet_eigensystem: zgeev failed (info " + std::to_string(info) + ")");
  }
  return out;
}

// max |(UP - PU)_ij| = 2 |U_ij| over pairs of opposite parity.
double parity_commutator(const Eigen::MatrixXcd& u) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < u.cols(); ++j) {
    const int pj = basis_parity(static_cast<std::size_t>(j));
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
      if (basis_parity(static_cast<std::size_t>(i)) != pj) {
        worst = std::max(worst, 2.0 * std::abs(u(i, j)));
      }
    }
  }
  return worst;
}

void diagonalize_blocks(const Eigen::MatrixXcd& u, FloquetEigensystem& es, std::vector<Level>& levels) {
  const auto dim = static_cast<std::size_t>(u.rows());
  for (int parity : {1, -1}) {
    std::vector<Eigen::Index> idx;
    for (std::size_t b = 0; b < dim; ++b) {
      if (basis_parity(b) == parity) {
        idx.push_back(static_cast<Eigen::Index>(b));
      }
    }
    const auto m = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXcd block(m, m);
    for (Eigen::Index c = 0; c < m; ++c) {
      for (Eigen::Index r = 0; r < m; ++r) {
        block(r, c) = u(idx[r], idx[c]);
      }
    }
    for (const Complex& lambda : general_eigen(std::move(block), false).values) {
      es.unit_circle_error = std::max(es.unit_circle_error, std::abs(std::abs(lambda) - 1.0));
      levels.push_back({fold_quasi_energy(-std::arg(lambda) / es.tau, es.tau), parity,
                        static_cast<double>(parity)});
    }
  }
}

// General path: diagonalize U, then rotate each near-degenerate cluster so
// that its vectors have definite parity where possible.
void diagonalize_full(const Eigen::MatrixXcd& u, FloquetEigensystem& es, std::vector<Level>& levels) {
  const GeneralEigen solver = general_eigen(u, true);
  const Eigen::Index dim = u.rows();
  Eigen::VectorXd p(dim);
  for (Eigen::Index b = 0; b < dim; ++b) {
    p(b) = basis_parity(static_cast<std::size_t>(b));
  }
  std::vector<double> mu(dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    const Complex lambda = solver.values(k);
    es.unit_circle_error = std::max(es.unit_circle_error, std::abs(std::abs(lambda) - 1.0));
    mu[k] = fold_quasi_energy(-std::arg(lambda) / es.tau, es.tau);
  }
  std::vector<Eigen::Index> order(dim);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return mu[a] < mu[b]; });

  std::size_t start = 0;
  while (start < order.size()) {
    std::size_t end = start + 1;
    while (end < order.size() && mu[order[end]] - mu[order[end - 1]] < kClusterWidth) {
      ++end;
    }
    const auto width = static_cast<Eigen::Index>(end - start);
    Eigen::MatrixXcd v(dim, width);
    for (Eigen::Index c = 0; c < width; ++c) {
      v.col(c) = solver.vectors.col(order[start + c]);
    }
    const Eigen::MatrixXcd q = Eigen::HouseholderQR<Eigen::MatrixXcd>(v).householderQ() *
                               Eigen::MatrixXcd::Identity(dim, width);
    const Eigen::MatrixXcd pq = p.asDiagonal() * q;
    const Eigen::MatrixXcd projected = q.adjoint() * pq;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> parity_solver(projected, Eigen::EigenvaluesOnly);
    for (Eigen::Index c = 0; c < width; ++c) {
      const double e = parity_solver.eigenvalues()(c);
      if (std::abs(e) <= 0.99) {
        es.parity_mixing = true;
      }
      levels.push_back({mu[order[start + c]], e >= 0.0 ? 1 : -1, e});
    }
    start = end;
  }
}

}  // namespace

double fold_quasi_energy(double mu, double tau) {
  const double zone = 2.0 * kPi / tau;
  double folded = std::fmod(mu, zone);
  if (folded <= -kPi / tau) {
    folded += zone;
  } else if (folded > kPi / tau) {
    folded -= zone;
  }
  return folded;
}

FloquetEigensystem floquet_eigensystem(const Eigen::MatrixXcd& u, double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw std::invalid_argument("floquet_eigensystem: tau must be finite and > 0");
  }
  if (u.rows() != u.cols() || u.rows() < 2 || !std::has_single_bit(static_cast<std::size_t>(u.rows()))) {
    throw std::invalid_argument("floquet_eigensystem: U must be square with dimension 2^N");
  }
  if (u.rows() > (Eigen::Index{1} << kExactEigenMaxSites)) {
    throw std::length_error("floquet_eigensystem: N exceeds the dense cap of " +
                            std::to_string(kExactEigenMaxSites));
  }
  // One BLAS thread per matrix keeps results independent of the pool size.
  openblas_set_num_threads(1);
  const double unitarity = max_unitarity_error(u);
  if (!(unitarity < kUnitarityTolerance)) {
    throw std::invalid_argument("floquet_eigensystem: U is not unitary (max |U^dag U - I| = " +
                                std::to_string(unitarity) + ")");
  }

  FloquetEigensystem es;
  es.tau = tau;
  es.hilbert_dim = static_cast<std::size_t>(u.rows());
  es.parity_commutator = parity_commutator(u);

  std::vector<Level> levels;
  levels.reserve(es.hilbert_dim);
  if (es.parity_commutator < kCommutatorTolerance) {
    es.parity_blocks = true;
    diagonalize_blocks(u, es, levels);
  } else {
    diagonalize_full(u, es, levels);
  }
  std::stable_sort(levels.begin(), levels.end(), [](const Level& a, const Level& b) { return a.mu < b.mu; });
  for (const Level& l : levels) {
    es.quasi_energies.push_back(l.mu);
    es.parities.push_back(l.parity);
    es.parity_expectations.push_back(l.expectation);
  }
  return es;
}

PairingGaps pairing_gaps(const FloquetEigensystem& es) {
  const std::size_t dim = es.quasi_energies.size();
  PairingGaps gaps;
  if (dim == 0) {
    return gaps;
  }
  const double zone = 2.0 * kPi / es.tau;
  const std::vector<double>& mu = es.quasi_energies;
  gaps.delta_0.resize(dim);
  gaps.delta_pi.resize(dim);
  double sum_0 = 0.0;
  double sum_pi = 0.0;
  for (std::size_t a = 0; a < dim; ++a) {
    const std::size_t next = (a + 1) % dim;
    gaps.delta_0[a] = mu[next] - mu[a] + (next <= a ? zone : 0.0);
    const std::size_t partner = (a + dim / 2) % dim;
    gaps.delta_pi[a] = fold_quasi_energy(mu[partner] - (mu[a] + kPi / es.tau), es.tau);
    sum_0 += std::log(std::max(std::abs(gaps.delta_0[a]), kGapFloor));
    sum_pi += std::log(std::max(std::abs(gaps.delta_pi[a]), kGapFloor));
  }
  gaps.mean_log_delta_0 = sum_0 / static_cast<double>(dim);
  gaps.mean_log_delta_pi = sum_pi / static_cast<double>(dim);
  return gaps;
}

PairingSlope fit_pairing_slope(double epsilon, std::span<const PairingPoint> points) {
  std::vector<double> x;
  std::vector<double> y0;
  std::vector<double> ypi;
  bool pinned = true;
  for (const PairingPoint& p : points) {
    x.push_back(std::log(static_cast<double>(p.n_sites)));
    y0.push_back(p.mean_log_delta_0);
    ypi.push_back(p.mean_log_delta_pi);
    pinned = pinned && p.mean_log_delta_pi < kPinnedLogGap;
  }
  if (points.size() < 3) {
    throw std::invalid_argument("pairing fit needs at least three system sizes");
  }
  PairingSlope slope;
  slope.epsilon = epsilon;
  slope.fit_0 = fit_line(x, y0);
  slope.fit_pi = fit_line(x, ypi);
  slope.pinned = pinned;
  if (pinned) {
    slope.fit_pi.slope = std::numeric_limits<double>::quiet_NaN();
  }
  slope.dtc_compatible = !pinned && slope.fit_pi.slope < slope.fit_0.slope;
  return slope;
}

PairingScaling pairing_size_scaling(const HamiltonianSpec& hamiltonian, const DriveSpec& drive,
                                    std::span<const int> sizes, std::span<const double> epsilons,
                                    PropagatorOptions options, int threads) {
  std::vector<int> distinct(sizes.begin(), sizes.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() != sizes.size() || distinct.size() < 3) {
    throw std::invalid_argument("pairing_size_scaling: need at least three distinct sizes");
  }
  if (distinct.back() > kExactEigenMaxSites) {
    throw std::length_error("pairing_size_scaling: N exceeds the dense cap of " +
                            std::to_string(kExactEigenMaxSites));
  }
  if (epsilons.empty()) {
    throw std::invalid_argument("pairing_size_scaling: no epsilon values");
  }
  if (drive.noisy()) {
    throw std::invalid_argument("pairing_size_scaling: the drive must be noise-free");
  }

  PairingScaling result;
  result.points.resize(epsilons.size() * distinct.size());
  parallel_for(result.points.size(), threads, [&](std::size_t i) {
    const double eps = epsilons[i / distinct.size()];
    const int n = distinct[i % distinct.size()];
    HamiltonianSpec h = hamiltonian;
    h.n_sites = n;
    DriveSpec d = drive;
    d.epsilon = eps;
    const Eigen::MatrixXcd u = build_floquet_matrix(build_hamiltonian(h), d, options);
    const PairingGaps gaps = pairing_gaps(floquet_eigensystem(u, d.period_tau));
    result.points[i] = {eps, n, gaps.mean_log_delta_0, gaps.mean_log_delta_pi};
  });
  for (std::size_t e = 0; e < epsilons.size(); ++e) {
    const std::span<const PairingPoint> row(result.points.data() + e * distinct.size(), distinct.size());
    result.slopes.push_back(fit_pairing_slope(epsilons[e], row));
  }
  return result;
}

}  // namespace dtc
