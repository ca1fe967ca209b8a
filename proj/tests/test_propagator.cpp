#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dtc/propagator.hpp"
#include "support.hpp"

using namespace dtc;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

HamiltonianSpec spec(int n, double j, double h, double alpha = kInf) {
  HamiltonianSpec s;
  s.n_sites = n;
  s.coupling = j;
  s.field = h;
  s.range_exponent = alpha;
  return s;
}

DriveSpec drive(double tau, double eps) {
  DriveSpec d;
  d.period_tau = tau;
  d.epsilon = eps;
  return d;
}

PropagatorOptions with(PropagationMethod m) { return {m, 1e-10}; }

}  // namespace

TEST_SUITE("propagator") {
  TEST_CASE("x-product states are eigenstates at h = 0") {
    const int n = 6;
    const double tau = 0.6;
    const auto h = build_hamiltonian(spec(n, 1.0, 0.0));
    const auto out = evolve_free(product_state_x(n, XDirection::right), h, tau);
    const Complex expected_phase = std::polar(1.0, (n - 1) * tau);
    const auto r = to_dense(product_state_x(n, XDirection::right));
    CHECK(std::abs(r.dot(to_dense(out)) - expected_phase) < 1e-12);
    CHECK(magnetization_x(out) == doctest::Approx(1.0).epsilon(1e-13));
  }

  TEST_CASE("free evolution matches the dense expm oracle") {
    std::mt19937_64 rng(21);
    const auto psi = oracle::random_state(4, rng);
    const oracle::Vec exact = oracle::expm_hermitian_step(oracle::hamiltonian(4, 1.0, 0.32), 0.6) * psi;
    for (auto m : {PropagationMethod::exact_eigen, PropagationMethod::krylov, PropagationMethod::automatic}) {
      const auto out = evolve_free(from_dense(4, psi), build_hamiltonian(spec(4, 1.0, 0.32)), 0.6, with(m));
      CHECK((to_dense(out) - exact).cwiseAbs().maxCoeff() < 1e-9);
    }
    const auto h0 = oracle::expm_hermitian_step(oracle::hamiltonian(5, 1.0, 0.0, 1.5), 0.8);
    const auto psi5 = oracle::random_state(5, rng);
    const auto out5 = evolve_free(from_dense(5, psi5), build_hamiltonian(spec(5, 1.0, 0.0, 1.5)), 0.8,
                                  with(PropagationMethod::x_diagonal));
    CHECK((to_dense(out5) - h0 * psi5).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("tau = 0 is the identity") {
    std::mt19937_64 rng(5);
    const auto psi = oracle::random_state(5, rng);
    for (auto m : {PropagationMethod::exact_eigen, PropagationMethod::krylov}) {
      const auto out = evolve_free(from_dense(5, psi), build_hamiltonian(spec(5, 1.0, 0.7)), 0.0, with(m));
      CHECK((to_dense(out) - psi).cwiseAbs().maxCoeff() < 1e-14);
    }
  }

  TEST_CASE("exact_eigen and krylov agree on random states up to N = 10") {
    std::mt19937_64 rng(99);
    for (int n : {6, 8, 10}) {
      const auto h = build_hamiltonian(spec(n, 1.0, 0.45, n == 8 ? 1.5 : kInf));
      const auto psi = oracle::random_state(n, rng);
      const auto a = to_dense(evolve_free(from_dense(n, psi), h, 0.7, with(PropagationMethod::exact_eigen)));
      const auto b = to_dense(evolve_free(from_dense(n, psi), h, 0.7, with(PropagationMethod::krylov)));
      CHECK((a - b).norm() < 1e-8);
    }
  }

  TEST_CASE("norm is preserved per step") {
    std::mt19937_64 rng(1);
    const auto h = build_hamiltonian(spec(7, 1.0, 0.9));
    for (auto m : {PropagationMethod::exact_eigen, PropagationMethod::krylov}) {
      const FreePropagator p(h, 0.6, with(m));
      auto s = from_dense(7, oracle::random_state(7, rng));
      for (int i = 0; i < 50; ++i) {
        const StepReport r = p.apply(s);
        CHECK(r.norm_drift < 1e-10);
      }
      CHECK(std::abs(s.norm() - 1.0) < 1e-10);
    }
  }

  TEST_CASE("method selection and its failures") {
    CHECK(FreePropagator(build_hamiltonian(spec(4, 1.0, 0.0)), 0.6).method() == PropagationMethod::x_diagonal);
    CHECK(FreePropagator(build_hamiltonian(spec(4, 1.0, 0.2)), 0.6).method() == PropagationMethod::exact_eigen);
    CHECK(FreePropagator(build_hamiltonian(spec(11, 1.0, 0.2)), 0.6).method() == PropagationMethod::krylov);
    CHECK_THROWS_AS(FreePropagator(build_hamiltonian(spec(4, 1.0, 0.2)), 0.6, with(PropagationMethod::x_diagonal)),
                    std::invalid_argument);
    CHECK_THROWS_AS(FreePropagator(build_hamiltonian(spec(13, 1.0, 0.2)), 0.6, with(PropagationMethod::exact_eigen)),
                    std::length_error);
    CHECK_THROWS_AS(FreePropagator(build_hamiltonian(spec(4, 1.0, 0.2)), -0.1), std::invalid_argument);
  }

  TEST_CASE("krylov fails loudly instead of truncating") {
    const auto h = build_hamiltonian(spec(8, 1.0, 0.3));
    std::mt19937_64 rng(4);
    const auto psi = oracle::random_state(8, rng);
    std::vector<Complex> v(psi.data(), psi.data() + psi.size());
    CHECK_THROWS_AS(krylov::expm_apply(h, 1e6, v, 1e-14), ConvergenceError);
  }

  TEST_CASE("kick with pi/2 maps |R> to |L>") {
    for (int n : {1, 3, 6}) {
      auto s = product_state_x(n, XDirection::right);
      apply_kick(s, std::vector<double>(n, std::numbers::pi / 2));
      CHECK(std::abs(to_dense(product_state_x(n, XDirection::left)).dot(to_dense(s))) ==
            doctest::Approx(1.0).epsilon(1e-14));
    }
  }

  TEST_CASE("zero kick is the identity and per-site angles match the oracle") {
    std::mt19937_64 rng(8);
    const auto psi = oracle::random_state(4, rng);
    auto s = from_dense(4, psi);
    apply_kick(s, std::vector<double>(4, 0.0));
    CHECK((to_dense(s) - psi).cwiseAbs().maxCoeff() < 1e-15);
    const std::vector<double> angles{0.1, -0.7, 1.3, 2.9};
    auto t = from_dense(4, psi);
    apply_kick(t, angles);
    CHECK((to_dense(t) - oracle::kick(4, angles) * psi).cwiseAbs().maxCoeff() < 1e-13);
    CHECK_THROWS_AS(apply_kick(t, std::vector<double>(3, 0.0)), std::invalid_argument);
  }

  TEST_CASE("single spin kicked repeatedly follows the closed form") {
    const double eps = 0.08;
    auto s = product_state_x(1, XDirection::right);
    const auto angles = kick_angles(1, drive(0.6, eps));
    const auto expected = oracle::free_spin_series(eps, 200);
    for (int n = 0; n < 200; ++n) {
      CHECK(std::abs(magnetization_x(s) - expected[n]) < 1e-12);
      apply_kick(s, angles);
    }
  }

  TEST_CASE("epsilon = 0, h = 0: back to |R> every two periods") {
    const int n = 6;
    const FloquetMap map(build_hamiltonian(spec(n, 1.0, 0.0)), drive(0.83, 0.0));
    auto s = product_state_x(n, XDirection::right);
    const auto r = to_dense(s);
    for (int step = 1; step <= 10; ++step) {
      map.step(s);
      CHECK(std::abs(std::abs(magnetization_x(s)) - 1.0) < 1e-12);
      if (step % 2 == 0) {
        CHECK(std::abs(r.dot(to_dense(s))) == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("epsilon = 0.5 switches the kick off") {
    const FloquetMap map(build_hamiltonian(spec(5, 1.0, 0.0)), drive(0.6, 0.5));
    auto s = product_state_x(5, XDirection::right);
    for (int step = 0; step < 20; ++step) {
      map.step(s);
      CHECK(magnetization_x(s) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("one period matches the dense oracle") {
    std::mt19937_64 rng(17);
    const auto psi = oracle::random_state(4, rng);
    const auto u = oracle::period_unitary(4, 1.0, 0.0, kInf, 0.6, 0.08);
    const FloquetMap map(build_hamiltonian(spec(4, 1.0, 0.0)), drive(0.6, 0.08));
    CHECK((to_dense(floquet_step(from_dense(4, psi), map)) - u * psi).cwiseAbs().maxCoeff() < 1e-9);
  }

  TEST_CASE("order is free evolution then kick") {
    // N = 1 with a field has a closed form.
    const IsingHamiltonian h(1, {}, 0.9);
    const DriveSpec d = drive(0.6, 0.08);
    const FloquetMap map(h, d);
    auto s = product_state_x(1, XDirection::right);
    map.step(s);
    const double phi = std::numbers::pi * (0.5 - d.epsilon);
    // exp(+i h tau sz) then exp(-i phi sz) rotates |-> > by 2(phi - h tau) about z.
    CHECK(magnetization_x(s) == doctest::Approx(std::cos(2.0 * (phi - 0.9 * 0.6))).epsilon(1e-13));
    // Those z rotations commute, so the order itself is pinned on a bond.
    const auto h2 = build_hamiltonian(spec(2, 1.0, 0.3));
    const FloquetMap map2(h2, d);
    auto a = product_state_x(2, XDirection::right);
    map2.step(a);
    auto b = product_state_x(2, XDirection::right);
    apply_kick(b, kick_angles(2, d));
    b = evolve_free(b, h2, 0.6);
    const auto u = oracle::period_unitary(2, 1.0, 0.3, kInf, 0.6, 0.08);
    CHECK((to_dense(a) - u * oracle::right(2)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(phase_aligned_distance(to_dense(a), to_dense(b)) > 1e-3);
  }

  TEST_CASE("dense Floquet matrix") {
    SUBCASE("N = 1 is the bare kick") {
      const IsingHamiltonian h(1, {}, 0.0);
      const auto u = build_floquet_matrix(h, drive(0.6, 0.0));
      CHECK((u - oracle::kick_uniform(1, 0.0)).cwiseAbs().maxCoeff() < 1e-14);
    }
    SUBCASE("matches the oracle and is unitary") {
      for (auto m : {PropagationMethod::automatic, PropagationMethod::krylov, PropagationMethod::exact_eigen}) {
        const auto u = build_floquet_matrix(build_hamiltonian(spec(6, 1.0, 0.32)), drive(0.6, 0.08), with(m));
        const auto dim = u.rows();
        CHECK((u.adjoint() * u - oracle::Mat::Identity(dim, dim)).cwiseAbs().maxCoeff() < 1e-9);
        CHECK((u - oracle::period_unitary(6, 1.0, 0.32, kInf, 0.6, 0.08)).cwiseAbs().maxCoeff() < 1e-9);
      }
      const auto u0 = build_floquet_matrix(build_hamiltonian(spec(5, 1.0, 0.0, 2.0)), drive(0.6, 0.1));
      CHECK((u0 - oracle::period_unitary(5, 1.0, 0.0, 2.0, 0.6, 0.1)).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("caps and noise are rejected") {
      DriveSpec noisy = drive(0.6, 0.0);
      noisy.noise_bound = 0.05;
      CHECK_THROWS_AS(build_floquet_matrix(build_hamiltonian(spec(4, 1.0, 0.0)), noisy), std::invalid_argument);
      CHECK_THROWS_AS(build_floquet_matrix(build_hamiltonian(spec(13, 1.0, 0.0)), drive(0.6, 0.0)),
                      std::length_error);
    }
  }

  TEST_CASE("kick noise is a pure function of its indices") {
    DriveSpec d = drive(0.6, 0.0);
    d.noise_bound = 0.05;
    d.rng_seed = 42;
    const auto a = kick_angles(6, d, 17, 3);
    const auto b = kick_angles(6, d, 17, 3);
    CHECK(a == b);
    CHECK(kick_angles(6, d, 18, 3) != a);
    CHECK(kick_angles(6, d, 17, 4) != a);
    for (int p = 0; p < 200; ++p) {
      for (double phi : kick_angles(6, d, p, 0)) {
        const double eps = 0.5 - phi / std::numbers::pi;
        CHECK(eps >= 0.0);
        CHECK(eps < 0.05 + 1e-15);
      }
    }
    d.rng_seed = 43;
    CHECK(kick_angles(6, d, 17, 3) != a);
  }
}
