#include <doctest.h>

#include <cmath>

#include "qdgate/dynamics.hpp"
#include "qdgate/model.hpp"
#include "support.hpp"

using namespace qdgate;
using qdgate::test::Rng;

namespace {

const Basis& two_level() {
  static const Basis b("two", {"g", "e"});
  return b;
}

MatrixXc rabi_h(double omega) {
  MatrixXc h = MatrixXc::Zero(2, 2);
  h(0, 1) = h(1, 0) = 0.5 * omega;
  return h;
}

}  // namespace

TEST_CASE("zero Hamiltonian keeps the state fixed") {
  Rng rng(31);
  const QuantumState psi0(test::random_state(3, rng), bases::single_dot());
  const auto traj = evolve_schrodinger([](double) { return MatrixXc::Zero(3, 3).eval(); }, psi0, {0.0, 5.0});
  REQUIRE(traj.size() == 501);
  for (const auto& s : traj.states) CHECK(max_abs(s - psi0.amplitudes()) == 0.0);
}

TEST_CASE("sample grid and metadata") {
  const QuantumState psi0 = QuantumState::basis_state(two_level(), "g");
  IntegratorConfig cfg;
  cfg.sample_interval = 0.25;
  const auto traj = evolve_schrodinger([](double) { return rabi_h(0.3); }, psi0, {1.0, 3.1}, cfg);
  REQUIRE(traj.size() == 10);
  CHECK(traj.times.front() == 1.0);
  CHECK(traj.times.back() == 3.1);
  CHECK(traj.basis == two_level());
  CHECK(traj.stats.accepted > 0);
  CHECK_FALSE(evolve_schrodinger([](double) { return rabi_h(0.3); }, psi0, {2.0, 2.0}).size() > 0);
}

TEST_CASE("Rabi oscillation matches the closed form") {
  const double omega = 0.37;
  const QuantumState psi0 = QuantumState::basis_state(two_level(), "g");
  IntegratorConfig cfg;
  cfg.sample_interval = 2.0;
  const auto traj = evolve_schrodinger([&](double) { return rabi_h(omega); }, psi0, {0.0, 38.0}, cfg);
  REQUIRE(traj.size() == 20);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double expected = std::pow(std::sin(omega * traj.times[k] / (2.0 * kHbar)), 2);
    CHECK(std::abs(std::norm(traj.states[k](1)) - expected) < 1e-7);
  }
}

TEST_CASE("piecewise-constant evolution matches products of exponentials") {
  Rng rng(32);
  for (int draw = 0; draw < 5; ++draw) {
    const std::vector<double> edges{0.0, 1.3, 2.1, 4.0, 6.5};
    std::vector<MatrixXc> pieces;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) pieces.push_back(test::random_hermitian(3, rng));
    auto h = [&](double t) -> MatrixXc {
      std::size_t k = 0;
      while (k + 2 < edges.size() && t >= edges[k + 1]) ++k;
      return pieces[k];
    };
    const QuantumState psi0(test::random_state(3, rng), bases::single_dot());

    VectorXc oracle = psi0.amplitudes();
    for (std::size_t k = 0; k < pieces.size(); ++k) {
      const Operator hk(pieces[k], bases::single_dot(), Frame::lab(), OperatorKind::Hamiltonian);
      oracle = matrix_exponential(hk, edges[k + 1] - edges[k]).matrix() * oracle;
    }
    const std::vector<double> inner(edges.begin() + 1, edges.end() - 1);
    const auto traj = evolve_schrodinger(h, psi0, {edges.front(), edges.back()}, {}, inner);
    CHECK((traj.states.back() - oracle).norm() < 1e-8);
    CHECK((propagate_piecewise(h, psi0.amplitudes(), edges) - oracle).norm() < 1e-12);
  }
}

TEST_CASE("closed evolution stays normalised") {
  Rng rng(33);
  const MatrixXc a = test::random_hermitian(4, rng), b = test::random_hermitian(4, rng);
  auto h = [&](double t) -> MatrixXc { return a + std::sin(0.7 * t) * b; };
  const QuantumState psi0(test::random_state(4, rng), bases::lambda_dot());
  const auto traj = evolve_schrodinger(h, psi0, {0.0, 20.0});
  const TrajectoryCheck c = check_trajectory(traj);
  CHECK(c.max_norm_error < 1e-7);
  CHECK(c.strictly_increasing_times);
}

TEST_CASE("time reversal returns the initial state") {
  Rng rng(34);
  const MatrixXc a = test::random_hermitian(3, rng), b = test::random_hermitian(3, rng);
  const double span = 15.0;
  auto h = [&](double t) -> MatrixXc { return a + std::cos(0.4 * t) * b; };
  auto reversed = [&](double s) -> MatrixXc { return -h(span - s); };
  const QuantumState psi0(test::random_state(3, rng), bases::single_dot());
  const auto fwd = evolve_schrodinger(h, psi0, {0.0, span});
  const auto back = evolve_schrodinger(reversed, QuantumState(fwd.states.back(), psi0.basis()), {0.0, span});
  CHECK((back.states.back() - psi0.amplitudes()).norm() < 1e-6);
}

TEST_CASE("lab-frame and RWA populations agree when the drive is weak") {
  auto discrepancy = [](double omega_a) {
    const DotPairParams p{omega_a, 0.85, 5.0};
    const PulseEnvelope env = PulseEnvelope::square_with_area(0.1, 2.0 * kPi * kHbar / std::sqrt(2.0));
    const LaserDrive d{env, p.resonant_carrier()};
    const QuantumState start = QuantumState::basis_state(bases::psi_subspace(), "11");
    const std::vector<double> edges = env.edges();
    const auto lab = evolve_schrodinger(
        [&](double t) { return subspace_hamiltonian_psi_basis(p, d, t).matrix(); }, start,
        {env.start(), env.end()}, {}, edges);
    const auto rwa = evolve_schrodinger([&](double t) { return rwa_subspace_hamiltonian(p, env, t).matrix(); },
                                        start, {env.start(), env.end()}, {}, edges);
    REQUIRE(lab.times == rwa.times);
    double worst = 0.0;
    for (std::size_t k = 0; k < lab.size(); ++k)
      worst = std::max(worst, (lab.states[k].cwiseAbs2() - rwa.states[k].cwiseAbs2()).cwiseAbs().maxCoeff());
    return worst;
  };
  const double coarse = discrepancy(100.0);
  const double fine = discrepancy(400.0);
  CHECK(coarse < 1e-3);
  CHECK(fine < coarse);
}

TEST_CASE("Lindblad without channels matches the Schrodinger equation") {
  Rng rng(35);
  const MatrixXc a = test::random_hermitian(4, rng), b = test::random_hermitian(4, rng);
  auto h = [&](double t) -> MatrixXc { return a + std::sin(t) * b; };
  const QuantumState psi0(test::random_state(4, rng), bases::lambda_dot());
  const auto pure = evolve_schrodinger(h, psi0, {0.0, 8.0});
  const auto mixed = evolve_lindblad(h, DensityMatrix::from_pure(psi0), {}, {0.0, 8.0});
  REQUIRE(pure.times == mixed.times);
  for (std::size_t k = 0; k < pure.size(); ++k) {
    const Eigen::VectorXd p1 = pure.states[k].cwiseAbs2();
    const Eigen::VectorXd p2 = mixed.states[k].diagonal().real();
    CHECK((p1 - p2).cwiseAbs().maxCoeff() < 1e-7);
  }
}

TEST_CASE("excited level decays exponentially into the sink") {
  const Basis& b = bases::lambda_dot();
  const std::vector<CollapseChannel> channels{CollapseChannel(projector(b, "s", "e"), 1.0)};
  const auto traj = evolve_lindblad([](double) { return MatrixXc::Zero(4, 4).eval(); },
                                    DensityMatrix::from_pure(QuantumState::basis_state(b, "e")), channels,
                                    {0.0, 1.0});
  const MatrixXc& rho = traj.states.back();
  CHECK(traj.times.back() == 1.0);
  CHECK(rho(2, 2).real() == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
  CHECK(rho(3, 3).real() == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-9));
  for (const auto& r : traj.states) CHECK(std::abs(r.trace().real() - 1.0) < 1e-7);
}

TEST_CASE("driven dissipative evolution keeps trace and positivity") {
  Rng rng(36);
  const Basis& b = bases::lambda_dot();
  const MatrixXc a = test::random_hermitian(4, rng);
  const std::vector<CollapseChannel> channels{CollapseChannel(projector(b, "s", "e"), 0.8),
                                              CollapseChannel(projector(b, "0", "1"), 0.3)};
  const auto traj = evolve_lindblad([&](double) { return a; },
                                    DensityMatrix::from_pure(QuantumState(test::random_state(4, rng), b)),
                                    channels, {0.0, 10.0});
  const TrajectoryCheck c = check_trajectory(traj);
  CHECK(c.max_norm_error < 1e-7);
  CHECK(c.min_eigenvalue >= -1e-6);
  CHECK(c.max_hermiticity_error < 1e-9);
}

TEST_CASE("collapse channels reject negative rates") {
  CHECK_THROWS_AS(CollapseChannel(projector(bases::lambda_dot(), "s", "e"), -0.1), std::invalid_argument);
}

TEST_CASE("invalid inputs are rejected") {
  const QuantumState unnormalised(VectorXc::Constant(2, 1.0), two_level());
  CHECK_THROWS_AS(evolve_schrodinger([](double) { return rabi_h(0.1); }, unnormalised, {0.0, 1.0}),
                  std::invalid_argument);
  MatrixXc bad = MatrixXc::Zero(2, 2);
  bad(0, 1) = 1.0;
  CHECK_THROWS_AS(evolve_schrodinger([&](double) { return bad; }, QuantumState::basis_state(two_level(), "g"),
                                     {0.0, 1.0}),
                  std::invalid_argument);
}

TEST_CASE("step budget exhaustion is a numerical error") {
  IntegratorConfig cfg;
  cfg.max_steps = 3;
  CHECK_THROWS_AS(evolve_schrodinger([](double) { return rabi_h(1.0); },
                                     QuantumState::basis_state(two_level(), "g"), {0.0, 50.0}, cfg),
                  NumericalError);
}

TEST_CASE("phase of an undriven |11> stays zero in the rotating frame") {
  const DotPairParams p;
  const PulseEnvelope off = PulseEnvelope::square(0.0, 0.0);
  const auto traj = evolve_schrodinger([&](double t) { return rwa_subspace_hamiltonian(p, off, t).matrix(); },
                                       QuantumState::basis_state(bases::psi_subspace(), "11"), {0.0, 30.0});
  const PhaseSeries ph = accumulated_phase(traj, "11");
  REQUIRE(ph.phase.size() == traj.size());
  for (double v : ph.phase) CHECK(v == 0.0);
  CHECK_FALSE(ph.needs_finer_sampling);
  CHECK_THROWS_AS(accumulated_phase(traj, "psi_m"), std::invalid_argument);
}

TEST_CASE("phase unwrapping follows a steadily rotating amplitude") {
  const Basis& b = two_level();
  auto h = [](double) -> MatrixXc {
    MatrixXc m = MatrixXc::Zero(2, 2);
    m(1, 1) = 2.0;
    return m;
  };
  VectorXc v(2);
  v << 0.6, 0.8;
  const auto traj = evolve_schrodinger(h, QuantumState(v, b), {0.0, 10.0});
  const PhaseSeries ph = accumulated_phase(traj, "e");
  CHECK(ph.final_phase() == doctest::Approx(-2.0 * 10.0 / kHbar).epsilon(1e-8));
  CHECK_FALSE(ph.needs_finer_sampling);

  IntegratorConfig coarse;
  coarse.sample_interval = 1.0;
  const auto sparse = evolve_schrodinger(h, QuantumState(v, b), {0.0, 10.0}, coarse);
  CHECK(accumulated_phase(sparse, "e").needs_finer_sampling);
}

TEST_CASE("samples with vanishing amplitude are interpolated and flagged") {
  const double omega = 0.4;
  const double t_pi = 2.0 * kPi * kHbar / omega;  // full Rabi cycle: |g> vanishes at t_pi / 2
  IntegratorConfig cfg;
  cfg.sample_interval = t_pi / 40.0;
  const auto traj = evolve_schrodinger([&](double) { return rabi_h(omega); },
                                       QuantumState::basis_state(two_level(), "g"), {0.0, t_pi}, cfg);
  const PhaseSeries ph = accumulated_phase(traj, "g");
  CHECK(std::count(ph.interpolated.begin(), ph.interpolated.end(), true) >= 1);
  CHECK(ph.interpolated[20]);
  CHECK(std::isfinite(ph.phase[20]));
}
