#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dtc/floquet.hpp"
#include "support.hpp"

using namespace dtc;

namespace {

constexpr double kPi = std::numbers::pi;

HamiltonianSpec spec(int n, double j, double h) {
  HamiltonianSpec s;
  s.n_sites = n;
  s.coupling = j;
  s.field = h;
  return s;
}

DriveSpec drive(double tau, double eps) {
  DriveSpec d;
  d.period_tau = tau;
  d.epsilon = eps;
  return d;
}

FloquetEigensystem eigensystem(int n, double h, double tau, double eps) {
  return floquet_eigensystem(build_floquet_matrix(build_hamiltonian(spec(n, 1.0, h)), drive(tau, eps)), tau);
}

// Circular distance in the quasi-energy zone.
double zone_distance(double a, double b, double tau) {
  const double period = 2 * kPi / tau;
  double d = std::fmod(std::abs(a - b), period);
  return std::min(d, period - d);
}

}  // namespace

TEST_SUITE("floquet") {
  TEST_CASE("bare two-site kick against the analytic 4x4 case") {
    const double tau = 0.6;
    const IsingHamiltonian h(2, {}, 0.0);
    const auto es = floquet_eigensystem(build_floquet_matrix(h, drive(tau, 0.0)), tau);
    REQUIRE(es.quasi_energies.size() == 4);
    // |01>, |10>: eigenvalue 1, odd parity. |00>, |11>: eigenvalue -1, even.
    CHECK(es.quasi_energies[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(es.quasi_energies[1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(es.quasi_energies[2] == doctest::Approx(kPi / tau));
    CHECK(es.quasi_energies[3] == doctest::Approx(kPi / tau));
    CHECK(es.parities[0] == -1);
    CHECK(es.parities[1] == -1);
    CHECK(es.parities[2] == 1);
    CHECK(es.parities[3] == 1);
  }

  TEST_CASE("exact pi pairing at eps = 0, h = 0") {
    const double tau = 0.6;
    const auto es = eigensystem(4, 0.0, tau, 0.0);
    const auto& mu = es.quasi_energies;
    for (double m : mu) {
      double best = 1e9;
      for (double other : mu) {
        best = std::min(best, zone_distance(other, m + kPi / tau, tau));
      }
      CHECK(best < 1e-9);
    }
    const auto gaps = pairing_gaps(es);
    for (double d : gaps.delta_pi) {
      CHECK(std::abs(d) < 1e-9);
    }
    CHECK(gaps.mean_log_delta_pi < std::log(1e-10));
    CHECK(gaps.mean_log_delta_0 > std::log(1e-10));
  }

  TEST_CASE("sign rule of the pairs for N = 4 and N = 6") {
    const double tau = 0.6;
    for (int n : {4, 6}) {
      const auto es = eigensystem(n, 0.0, tau, 0.0);
      const auto h = build_hamiltonian(spec(n, 1.0, 0.0));
      // Eigenvalue of (|s> + p|-s>)/sqrt2 is (-i)^N p exp(-i E_s tau).
      const Complex prefactor = std::pow(Complex(0.0, -1.0), n);
      std::vector<std::pair<int, double>> expected;
      const auto energies = h.x_energies();
      for (std::uint64_t s = 0; s < energies.size(); ++s) {
        if (s & 1U) {
          continue;  // one representative per {s, -s} pair
        }
        for (int p : {1, -1}) {
          const Complex lambda = prefactor * static_cast<double>(p) * std::polar(1.0, -energies[s] * tau);
          expected.emplace_back(p, fold_quasi_energy(-std::arg(lambda) / tau, tau));
        }
      }
      std::vector<std::pair<int, double>> got;
      for (std::size_t a = 0; a < es.quasi_energies.size(); ++a) {
        got.emplace_back(es.parities[a], es.quasi_energies[a]);
      }
      std::sort(expected.begin(), expected.end());
      std::sort(got.begin(), got.end());
      REQUIRE(got.size() == expected.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i].first == expected[i].first);
        CHECK(zone_distance(got[i].second, expected[i].second, tau) < 1e-9);
      }
    }
  }

  TEST_CASE("eigensystem invariants with field and imperfect kick") {
    const double tau = 0.6;
    const auto es = eigensystem(6, 0.32, tau, 0.08);
    CHECK(es.hilbert_dim == 64);
    CHECK(es.unit_circle_error < 1e-9);
    CHECK(es.parity_commutator < 1e-9);
    CHECK(es.parity_blocks);
    CHECK_FALSE(es.parity_mixing);
    int sum = 0;
    for (int p : es.parities) {
      sum += p;
    }
    CHECK(sum == 0);
    for (double e : es.parity_expectations) {
      CHECK(std::abs(e) > 0.99);
    }
    CHECK(std::is_sorted(es.quasi_energies.begin(), es.quasi_energies.end()));
    for (double m : es.quasi_energies) {
      CHECK(m > -kPi / tau);
      CHECK(m <= kPi / tau + 1e-12);
    }
    // The quasi-energies reproduce the oracle's eigenvalues.
    const auto u = oracle::period_unitary(6, 1.0, 0.32, std::numeric_limits<double>::infinity(), tau, 0.08);
    Eigen::ComplexEigenSolver<oracle::Mat> ces(u);
    std::vector<double> ref;
    for (auto l : ces.eigenvalues()) {
      ref.push_back(fold_quasi_energy(-std::arg(l) / tau, tau));
    }
    std::sort(ref.begin(), ref.end());
    for (std::size_t a = 0; a < ref.size(); ++a) {
      CHECK(zone_distance(ref[a], es.quasi_energies[a], tau) < 1e-9);
    }
  }

  TEST_CASE("a matrix that mixes parity goes through cluster rotation") {
    // A random unitary that does not commute with P.
    std::mt19937_64 rng(5);
    oracle::Mat m(8, 8);
    std::normal_distribution<double> g;
    for (Eigen::Index i = 0; i < 8; ++i) {
      for (Eigen::Index j = 0; j < 8; ++j) {
        m(i, j) = Complex(g(rng), g(rng));
      }
    }
    const oracle::Mat q = Eigen::HouseholderQR<oracle::Mat>(m).householderQ();
    const auto es = floquet_eigensystem(q, 1.0);
    CHECK_FALSE(es.parity_blocks);
    CHECK(es.parity_commutator > 1e-3);
    CHECK(es.unit_circle_error < 1e-9);
  }

  TEST_CASE("degenerate clusters are resolved into parity eigenstates") {
    // Basis 0 and 3 are even, 1 and 2 odd. Eigenvalue 1 is shared by e0 and e1
    // (one of each parity); e2 and e3 are mixed into (e2 +- e3)/sqrt2 with
    // distinct eigenvalues, so U does not commute with P.
    oracle::Mat u = oracle::Mat::Zero(4, 4);
    u(0, 0) = 1.0;
    u(1, 1) = 1.0;
    const Complex a = Complex(0.0, 1.0);
    const Complex b = -1.0;
    u(2, 2) = 0.5 * (a + b);
    u(3, 3) = 0.5 * (a + b);
    u(2, 3) = 0.5 * (a - b);
    u(3, 2) = 0.5 * (a - b);
    const auto es = floquet_eigensystem(u, 1.0);
    CHECK_FALSE(es.parity_blocks);
    CHECK(es.parity_mixing);
    int definite = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      if (std::abs(es.quasi_energies[k]) < 1e-12) {
        CHECK(std::abs(es.parity_expectations[k]) > 0.99);
        ++definite;
      } else {
        CHECK(std::abs(es.parity_expectations[k]) < 1e-9);
      }
    }
    CHECK(definite == 2);
  }

  TEST_CASE("input validation") {
    CHECK_THROWS_AS(floquet_eigensystem(oracle::Mat::Identity(4, 4) * 1.1, 0.6), std::invalid_argument);
    CHECK_THROWS_AS(floquet_eigensystem(oracle::Mat::Identity(3, 3), 0.6), std::invalid_argument);
    CHECK_THROWS_AS(floquet_eigensystem(oracle::Mat::Identity(4, 4), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(floquet_eigensystem(oracle::Mat::Identity(4, 2), 0.6), std::invalid_argument);
  }

  TEST_CASE("folding is idempotent and 2 pi / tau periodic") {
    const double tau = 0.6;
    for (double mu : {-9.0, -kPi / tau, -1.0, 0.0, 2.5, kPi / tau, 7.3}) {
      const double f = fold_quasi_energy(mu, tau);
      CHECK(f > -kPi / tau);
      CHECK(f <= kPi / tau);
      CHECK(fold_quasi_energy(f, tau) == doctest::Approx(f));
      CHECK(zone_distance(fold_quasi_energy(mu + 2 * kPi / tau, tau), f, tau) < 1e-12);
    }
    CHECK(fold_quasi_energy(-kPi / tau, tau) == doctest::Approx(kPi / tau));
  }

  TEST_CASE("evenly spaced synthetic spectrum is exactly pi paired") {
    const double tau = 0.7;
    const std::size_t dim = 16;
    FloquetEigensystem es;
    es.tau = tau;
    es.hilbert_dim = dim;
    for (std::size_t a = 0; a < dim; ++a) {
      es.quasi_energies.push_back((static_cast<double>(a) - dim / 2.0 + 1.0) * 2 * kPi / (dim * tau));
      es.parities.push_back(a % 2 == 0 ? 1 : -1);
    }
    const auto gaps = pairing_gaps(es);
    REQUIRE(gaps.delta_pi.size() == dim);
    for (double d : gaps.delta_pi) {
      CHECK(std::abs(d) < 1e-12);
    }
    for (double d : gaps.delta_0) {
      CHECK(d == doctest::Approx(2 * kPi / (dim * tau)));
    }
    CHECK(gaps.mean_log_delta_pi < std::log(1e-11));
    CHECK(gaps.mean_log_delta_0 == doctest::Approx(std::log(2 * kPi / (dim * tau))));
  }

  TEST_CASE("eps = 0.2 breaks the pairing at N = 4") {
    const auto clean = pairing_gaps(eigensystem(4, 0.0, 0.6, 0.0));
    const auto broken = pairing_gaps(eigensystem(4, 0.0, 0.6, 0.2));
    CHECK(broken.mean_log_delta_pi > clean.mean_log_delta_pi + 10.0);
    CHECK(std::abs(broken.mean_log_delta_pi - broken.mean_log_delta_0) < 1.5);
  }

  TEST_CASE("slope fit on planted power laws") {
    std::vector<PairingPoint> pts;
    for (int n : {4, 6, 8, 10}) {
      pts.push_back({0.03, n, 0.5 - 2.0 * std::log(n), -1.0 - 5.0 * std::log(n)});
    }
    const auto s = fit_pairing_slope(0.03, pts);
    CHECK(s.slope_b0() == doctest::Approx(-2.0));
    CHECK(s.slope_bpi() == doctest::Approx(-5.0));
    CHECK(s.fit_0.intercept == doctest::Approx(0.5));
    CHECK(s.dtc_compatible);
    CHECK_FALSE(s.pinned);

    std::vector<PairingPoint> floor;
    for (int n : {4, 6, 8}) {
      floor.push_back({0.0, n, -1.0, std::log(kGapFloor)});
    }
    const auto p = fit_pairing_slope(0.0, floor);
    CHECK(p.pinned);
    CHECK_FALSE(p.dtc_compatible);
    CHECK(std::isnan(p.slope_bpi()));
    CHECK_THROWS(fit_pairing_slope(0.0, std::span<const PairingPoint>(floor.data(), 2)));
  }

  TEST_CASE("size scaling runs and validates") {
    const std::vector<int> sizes{4, 6, 8};
    const std::vector<double> eps{0.0, 0.02};
    HamiltonianSpec h = spec(4, 1.0, 0.32);
    DriveSpec d = drive(0.6, 0.0);
    const auto a = pairing_size_scaling(h, d, sizes, eps, {}, 1);
    const auto b = pairing_size_scaling(h, d, sizes, eps, {}, 2);
    REQUIRE(a.points.size() == 6);
    REQUIRE(a.slopes.size() == 2);
    CHECK(a.points[0].epsilon == 0.0);
    CHECK(a.points[0].n_sites == 4);
    CHECK(a.points[3].epsilon == 0.02);
    for (std::size_t i = 0; i < a.points.size(); ++i) {
      CHECK(a.points[i].mean_log_delta_pi == b.points[i].mean_log_delta_pi);
    }
    // Each point is the gap average of the matching eigensystem.
    const auto direct = pairing_gaps(eigensystem(6, 0.32, 0.6, 0.02));
    CHECK(a.points[4].mean_log_delta_0 == doctest::Approx(direct.mean_log_delta_0).epsilon(1e-10));

    const std::vector<int> two{4, 6};
    const std::vector<int> dup{4, 4, 6};
    const std::vector<int> big{4, 6, 14};
    CHECK_THROWS_AS(pairing_size_scaling(h, d, two, eps), std::invalid_argument);
    CHECK_THROWS_AS(pairing_size_scaling(h, d, dup, eps), std::invalid_argument);
    CHECK_THROWS_AS(pairing_size_scaling(h, d, big, eps), std::length_error);
    d.noise_bound = 0.1;
    CHECK_THROWS_AS(pairing_size_scaling(h, d, sizes, eps), std::invalid_argument);
  }
}
