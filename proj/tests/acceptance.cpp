// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qdgate/gates.hpp"

using namespace qdgate;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = Clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " exception: " << e.what();
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s C%d %s |%s | %.2fs\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.str().c_str(),
              secs);
  std::fflush(stdout);
}

template <typename F>
double timed(F&& f) {
  const auto t0 = Clock::now();
  f();
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

PulseEnvelope cphase_square(double rabi) {
  return PulseEnvelope::square_with_area(rabi, 2.0 * kPi * kHbar / std::sqrt(2.0));
}

bool check(Outcome& o, bool ok, const std::string& what) {
  if (!ok) {
    o.pass = false;
    o.detail << " [violated: " << what << "]";
  }
  return ok;
}

MatrixXc random_hermitian(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  MatrixXc m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
  return 0.5 * (m + m.adjoint());
}

}  // namespace

int main() {
  const DotPairParams p;  // V_F = 0.85, V_XX = 5, ω_a = 2 eV

  report(1, "cphase gate time in 14.5-30 ps", [&](Outcome& o) {
    for (double rabi : {0.1, 0.2}) {
      CphaseRun run = run_cphase(p, cphase_square(0.1));
      const double secs = timed([&] { run = run_cphase(p, cphase_square(rabi)); });
      const double t = run.report.gate_time;
      o.detail << " T(" << rabi << ")=" << t << "ps in " << secs << "s";
      check(o, t >= 14.5 && t <= 30.0, "T window");
      check(o, secs < 1.0, "runtime < 1 s");
    }
  });

  report(2, "conditional phase and fidelity at rabi 0.1", [&](Outcome& o) {
    CphaseRun run = run_cphase(p, cphase_square(0.1));
    const double secs = timed([&] { run = run_cphase(p, cphase_square(0.1)); });
    const GateReport& r = run.report;
    const double d11 = phase_distance(r.phi[3], kPi);
    const double dth = phase_distance(r.theta, kPi);
    o.detail << " phi11=" << r.phi[3] << " (|d|=" << d11 << ") theta=" << r.theta << " (|d|=" << dth
             << ") F=" << r.fidelity << " in " << secs << "s";
    check(o, d11 <= 0.02, "|phi11 - pi| <= 0.02");
    check(o, dth <= 0.02, "|theta - pi| <= 0.02");
    check(o, r.fidelity >= 0.95 && r.fidelity <= 0.995, "F in [0.95, 0.995]");
    check(o, secs < 10.0, "runtime < 10 s");
  });

  report(3, "spectator phase suppression trend", [&](Outcome& o) {
    double previous = INFINITY;
    double last = 0.0;
    for (double ratio : {0.3, 0.15, 0.05}) {
      const CphaseRun run = run_cphase(p, cphase_square(ratio * p.v_f));
      last = std::abs(run.report.phi[2]);
      o.detail << " |phi10|(" << ratio << ")=" << last;
      check(o, last < previous, "strictly decreasing");
      previous = last;
    }
    check(o, last < 0.05, "|phi10| < 0.05 at ratio 0.05");
  });

  report(4, "effective model eigenvalues", [&](Outcome& o) {
    const double gap = p.biexciton_detuning();
    for (double r : {0.01, 0.03, 0.05}) {
      const double omega_prime = 2.0 * r * gap;
      const Eigen::VectorXd eff =
          Eigen::SelfAdjointEigenSolver<MatrixXc>(effective_hamiltonian(p, omega_prime).matrix()).eigenvalues();
      const Eigen::VectorXd full = Eigen::SelfAdjointEigenSolver<MatrixXc>(
                                       rwa_subspace_hamiltonian(p, PulseEnvelope::square(omega_prime / std::sqrt(2.0), 1.0), 0.5)
                                           .matrix())
                                       .eigenvalues();
      std::vector<double> exact;
      for (Eigen::Index k = 0; k < full.size(); ++k)
        if (std::abs(full(k) + 2.0 * p.v_f) > 1e-9) exact.push_back(full(k));  // drop the ψ₋ level
      std::sort(exact.begin(), exact.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
      exact.resize(2);
      std::sort(exact.begin(), exact.end());
      double worst = 0.0;
      for (int k = 0; k < 2; ++k)
        worst = std::max(worst, std::abs(eff(k) - exact[static_cast<std::size_t>(k)]) /
                                    std::abs(exact[static_cast<std::size_t>(k)]));
      o.detail << " r=" << r << ":" << worst << "<" << 10.0 * r * r;
      check(o, worst < 10.0 * r * r, "relative error bound");
    }
  });

  report(5, "z-rotation selectivity numbers", [&](Outcome& o) {
    const double f20 = selectivity_fidelity(kPi * kHbar / 20.0, 1.0);
    const double f7 = selectivity_fidelity(kPi * kHbar / 7.0, 1.0);
    o.detail << " F(20ps)=" << f20 << " F(7ps)=" << f7;
    check(o, f20 >= 0.985 && f20 <= 0.992, "F(20 ps) in [0.985, 0.992]");
    check(o, f7 >= 0.90 && f7 <= 0.92, "F(7 ps) in [0.90, 0.92]");
  });

  report(6, "Raman gate regime at rabi 1.33", [&](Outcome& o) {
    const std::vector<double> detunings{2.0, 4.0, 6.0, 8.0, 10.0, 15.0, 20.0};
    bool exists = false;
    for (double gamma : {0.1, 1.0}) {
      double last_f = -1.0, last_t = -1.0;
      o.detail << " gamma=" << gamma << ":";
      for (double nu : detunings) {
        RamanParams r;
        r.rabi = 1.33;
        r.gamma = gamma;
        r.detuning = nu;
        const RamanRun run = run_raman_x(r);
        o.detail << " (" << nu << "," << run.fidelity << "," << run.gate_time << "ps)";
        check(o, run.fidelity > last_f, "fidelity increases with detuning");
        check(o, run.gate_time > last_t, "gate time increases with detuning");
        last_f = run.fidelity;
        last_t = run.gate_time;
        if (gamma == 0.1 && run.fidelity >= 0.985 && run.gate_time <= 20.0) exists = true;
      }
    }
    check(o, exists, "some detuning with F >= 0.985 at T <= 20 ps for gamma 0.1");
  });

  report(7, "property suite", [&](Outcome& o) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    // Block decoupling of the nine-level Hamiltonian.
    const Basis& two = bases::two_dot();
    auto block = [](const std::string& l) {
      if (l == "00") return 0;
      if (l == "01" || l == "0X") return 1;
      if (l == "10" || l == "X0") return 2;
      return 3;
    };
    int leaks = 0;
    for (int draw = 0; draw < 100; ++draw) {
      const double omega = 2.0 * u01(rng), t = 60.0 * u01(rng);
      const Operator h = full_hamiltonian(p, {PulseEnvelope::square(omega, 60.0), p.resonant_carrier()}, t);
      for (const auto& r : two.labels())
        for (const auto& c : two.labels())
          if (block(r) != block(c) && h.element(r, c) != Complex(0.0)) ++leaks;
    }
    o.detail << " decoupling_leaks=" << leaks;
    check(o, leaks == 0, "block decoupling");

    // Pauli blocking of |00> and |0>.
    const CphaseRun cp = run_cphase(p, cphase_square(0.1));
    bool blocked = true;
    for (const auto& s : cp.branches[0].states) blocked = blocked && s(0) == Complex(1.0);
    ZGateParams z;
    z.pi_pulse = PulseEnvelope::square_with_area(0.2, kPi * kHbar);
    z.free_time = 1.7;
    const ZRotationResult zr = run_z_rotation(p, z, {}, 1.0, 0.0);
    blocked = blocked && zr.final_state.amplitude("0") == Complex(1.0) &&
              zr.final_state.amplitude("1") == Complex(0.0) && zr.final_state.amplitude("X") == Complex(0.0);
    o.detail << " pauli_blocking=" << (blocked ? "exact" : "broken");
    check(o, blocked, "Pauli blocking");

    // Unitarity of emitted pure trajectories; trace and positivity of mixed ones.
    double worst_norm = 0.0;
    for (const auto& b : cp.branches) worst_norm = std::max(worst_norm, check_trajectory(b).max_norm_error);
    worst_norm = std::max(worst_norm, check_trajectory(zr.trajectory).max_norm_error);
    RamanParams rp;
    rp.gamma = 0.5;
    const RamanRun rr = run_raman_x(rp);
    const TrajectoryCheck mc = check_trajectory(rr.trajectory);
    o.detail << " norm_err=" << worst_norm << " trace_err=" << mc.max_norm_error
             << " min_eig=" << mc.min_eigenvalue;
    check(o, worst_norm < 1e-7, "unitarity 1e-7");
    check(o, mc.max_norm_error < 1e-7, "trace 1e-7");
    check(o, mc.min_eigenvalue >= -1e-6, "positivity -1e-6");

    // Integrator against products of exponentials.
    const std::vector<double> edges{0.0, 0.9, 2.4, 3.0, 5.5};
    std::vector<MatrixXc> pieces;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) pieces.push_back(random_hermitian(3, rng));
    auto hp = [&](double t) -> MatrixXc {
      std::size_t k = 0;
      while (k + 2 < edges.size() && t >= edges[k + 1]) ++k;
      return pieces[k];
    };
    VectorXc oracle = VectorXc::Zero(3);
    oracle(1) = 1.0;
    const QuantumState psi0(oracle, bases::single_dot());
    for (std::size_t k = 0; k < pieces.size(); ++k)
      oracle = matrix_exponential(Operator(pieces[k], bases::single_dot(), Frame::lab(), OperatorKind::Hamiltonian),
                                  edges[k + 1] - edges[k])
                   .matrix() *
               oracle;
    const std::vector<double> inner(edges.begin() + 1, edges.end() - 1);
    const double oracle_err = (evolve_schrodinger(hp, psi0, {0.0, 5.5}, {}, inner).states.back() - oracle).norm();
    o.detail << " expm_err=" << oracle_err;
    check(o, oracle_err < 1e-8, "integrator vs exponential 1e-8");

    // Closed-form Rabi oscillation.
    const Basis tl("two", {"g", "e"});
    const double omega = 0.37;
    MatrixXc hr = MatrixXc::Zero(2, 2);
    hr(0, 1) = hr(1, 0) = 0.5 * omega;
    IntegratorConfig cfg;
    cfg.sample_interval = 2.0;
    const auto rabi = evolve_schrodinger([&](double) { return hr; }, QuantumState::basis_state(tl, "g"), {0.0, 38.0}, cfg);
    double rabi_err = 0.0;
    for (std::size_t k = 0; k < rabi.size(); ++k)
      rabi_err = std::max(rabi_err, std::abs(std::norm(rabi.states[k](1)) -
                                             std::pow(std::sin(omega * rabi.times[k] / (2.0 * kHbar)), 2)));
    o.detail << " rabi_err=" << rabi_err;
    check(o, rabi_err < 1e-7, "closed-form Rabi 1e-7");
  });

  report(8, "theta invariant under local Z phases", [&](Outcome& o) {
    const CphaseRun run = run_cphase(p, cphase_square(0.1));
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    double worst = 0.0;
    for (int draw = 0; draw < 1000; ++draw) {
      const double a = angle(rng), b = angle(rng), g = angle(rng);
      std::array<double, 4> phi = run.report.phi;
      phi[0] += g;
      phi[1] += g + b;
      phi[2] += g + a;
      phi[3] += g + a + b;
      worst = std::max(worst, phase_distance(entangling_phase(phi), run.report.theta));
    }
    o.detail << " max_change=" << worst;
    check(o, worst < 1e-12, "change < 1e-12");
  });

  std::printf("%s: %d criteria failed\n", failures ? "ACCEPTANCE FAILED" : "ACCEPTANCE PASSED", failures);
  return failures ? 1 : 0;
}
