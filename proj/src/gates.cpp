#include "qdgate/gates.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace qdgate {

double GateReport::mean_leakage() const {
  return std::accumulate(leakage.begin(), leakage.end(), 0.0) / 4.0;
}

double cphase_pulse_area(const PulseEnvelope& envelope) {
  return enhanced_rabi(envelope.area()) / kHbar;
}

namespace {

struct Branch {
  const Basis* basis;
  const char* input;
  HamiltonianFn hamiltonian;
};

bool is_computational(const std::string& label) {
  return std::find_if(kComputationalLabels.begin(), kComputationalLabels.end(),
                      [&](const char* c) { return label == c; }) != kComputationalLabels.end();
}

std::string format_ratio(const char* name, double value, double threshold) {
  std::ostringstream out;
  out << name << " ratio " << value << " exceeds threshold " << threshold;
  return out.str();
}

}  // namespace

CphaseRun run_cphase(const DotPairParams& p, const PulseEnvelope& envelope,
                     const IntegratorConfig& cfg, const CphaseOptions& options) {
  p.validate();
  const double area = cphase_pulse_area(envelope);
  if (area != 0.0 && std::abs(area - 2.0 * kPi) > options.area_tolerance * 2.0 * kPi) {
    std::ostringstream msg;
    msg << "run_cphase: pulse area " << area << " rad is not within "
        << 100.0 * options.area_tolerance << "% of 2π";
    throw std::invalid_argument(msg.str());
  }

  const Frame rot = Frame::rotating(p.resonant_carrier());
  const std::array<Branch, 4> branches{{
      {&bases::blocked(), "00", [](double) -> MatrixXc { return MatrixXc::Zero(1, 1); }},
      {&bases::spectator_b(), "01",
       [&](double t) -> MatrixXc {
         return spectator_hamiltonian(p, envelope, t, Spectator::DotB).matrix();
       }},
      {&bases::spectator_a(), "10",
       [&](double t) -> MatrixXc {
         return spectator_hamiltonian(p, envelope, t, Spectator::DotA).matrix();
       }},
      {&bases::psi_subspace(), "11",
       [&](double t) -> MatrixXc { return rwa_subspace_hamiltonian(p, envelope, t).matrix(); }},
  }};

  CphaseRun run;
  GateReport& report = run.report;
  report.gate_time = envelope.duration();
  report.conditions = check_conditions(p, envelope, options.thresholds);
  if (!report.conditions.pass_biexciton)
    report.warnings.push_back(format_ratio("biexciton", report.conditions.r_biexciton,
                                           report.conditions.threshold_biexciton));
  if (!report.conditions.pass_spectator)
    report.warnings.push_back(format_ratio("spectator", report.conditions.r_spectator,
                                           report.conditions.threshold_spectator));

  const TimeSpan span{envelope.start(), envelope.end()};
  const std::vector<double> edges = envelope.edges();
  report.block.setZero();

  for (std::size_t n = 0; n < branches.size(); ++n) {
    const Branch& b = branches[n];
    const QuantumState psi0 = QuantumState::basis_state(*b.basis, b.input, rot);
    run.branches[n] = evolve_schrodinger(b.hamiltonian, psi0, span, cfg, edges);
    const PureTrajectory& traj = run.branches[n];
    const VectorXc& psi = final_state(traj, psi0.amplitudes());

    if (traj.empty()) {
      run.phases[n] = PhaseSeries{};
      report.phi[n] = std::arg(psi(b.basis->index(b.input)));
    } else {
      run.phases[n] = accumulated_phase(traj, b.input);
      report.phi[n] = run.phases[n].final_phase();
      if (run.phases[n].needs_finer_sampling)
        report.warnings.push_back(std::string("phase of |") + b.input +
                                  "> jumped by more than pi/2 between samples; "
                                  "reduce sample_interval");
    }

    double leak = 0.0;
    for (std::size_t i = 0; i < b.basis->dim(); ++i) {
      const std::string& label = b.basis->label(i);
      if (is_computational(label)) {
        const auto m = static_cast<Eigen::Index>(
            std::find_if(kComputationalLabels.begin(), kComputationalLabels.end(),
                         [&](const char* c) { return label == c; }) -
            kComputationalLabels.begin());
        report.block(m, static_cast<Eigen::Index>(n)) = psi(i);
      } else {
        leak += std::norm(psi(i));
        report.residuals[label] = std::norm(psi(i));
      }
    }
    report.populations[n] = std::norm(report.block(n, n));
    report.leakage[n] = leak;
  }

  report.theta = entangling_phase(report);
  report.fidelity = cphase_fidelity(report);
  if (report.mean_leakage() > 1e-2) {
    std::ostringstream msg;
    msg << "mean leakage " << report.mean_leakage() << " out of the computational basis";
    report.warnings.push_back(msg.str());
  }
  return run;
}

std::pair<Complex, Complex> analytic_11_evolution(const DotPairParams& p, double area, double t,
                                                  Frame::Kind frame) {
  Complex amp_psi = -kI * std::sin(0.5 * area);
  if (frame == Frame::Kind::Lab) amp_psi *= std::exp(-kI * p.resonant_carrier() * t / kHbar);
  return {Complex(std::cos(0.5 * area)), amp_psi};
}

double entangling_phase(const std::array<double, 4>& phi) {
  return wrap_phase(phi[0] - phi[1] - phi[2] + phi[3]);
}

double entangling_phase(const GateReport& report) { return entangling_phase(report.phi); }

double cphase_fidelity(const Eigen::Matrix4cd& block) {
  const Eigen::Vector4cd ideal(1.0, 1.0, 1.0, -1.0);
  const Complex overlap = (ideal.conjugate().asDiagonal() * block).trace();
  return std::clamp(std::norm(overlap) / 16.0, 0.0, 1.0);
}

double cphase_fidelity(const GateReport& report) { return cphase_fidelity(report.block); }

CommensurateDrive commensurate_drive(const DotPairParams& p, double requested_rabi) {
  if (!(requested_rabi > 0.0)) throw std::invalid_argument("requested Rabi energy must be positive");
  const double vf = std::abs(p.v_f);
  const double ratio = vf / requested_rabi;
  const int n = std::max(1, static_cast<int>(std::lround(std::sqrt(0.5 * (ratio * ratio + 1.0)))));
  const double rabi = vf / std::sqrt(2.0 * n * n - 1.0);
  return {rabi, 2.0 * kPi * kHbar / enhanced_rabi(rabi), n};
}

// ---------------------------------------------------------------------------

double free_time_for_phase(const DotPairParams& p, double phi) {
  p.validate();
  double target = std::fmod(phi, 2.0 * kPi);
  if (target < 0.0) target += 2.0 * kPi;
  return target * kHbar / p.omega_a;
}

namespace {

constexpr std::size_t kZero = 0, kOne = 1, kExciton = 2;

MatrixXc single_dot_coupling(double field) {
  MatrixXc h = MatrixXc::Zero(3, 3);
  h(kOne, kExciton) = h(kExciton, kOne) = field;
  return h;
}

struct ZSchedule {
  double pulse;      // π-pulse length
  double free_time;  // T_s
  double second_start() const { return pulse + free_time; }
  double end() const { return 2.0 * pulse + free_time; }
};

// Lab-frame protocol: each pulse's carrier phase is referenced to its own start.
PureTrajectory z_protocol_lab(const DotPairParams& p, const PulseEnvelope& pulse0,
                              const ZSchedule& s, const QuantumState& psi0,
                              const IntegratorConfig& cfg) {
  const PulseEnvelope first = pulse0.shifted(-pulse0.start());
  const PulseEnvelope second = first.shifted(s.second_start());
  const LaserDrive d1{first, p.omega_a, 0.0};
  const LaserDrive d2{second, p.omega_a, s.second_start()};
  // Interaction picture with respect to the bare exciton energy: the full
  // carrier (counter-rotating part included) stays in the coupling, while the
  // fast diagonal phase is applied exactly when sampling.
  auto h = [&](double t) -> MatrixXc {
    double field = 0.0;
    if (t <= s.pulse)
      field = d1.field(t);
    else if (t >= s.second_start())
      field = d2.field(t);
    MatrixXc m = MatrixXc::Zero(3, 3);
    const Complex c = field * std::exp(-kI * p.omega_a * t / kHbar);
    m(kOne, kExciton) = c;
    m(kExciton, kOne) = std::conj(c);
    return m;
  };
  const std::vector<double> edges{s.pulse, s.second_start()};
  PureTrajectory traj = evolve_schrodinger(h, psi0, {0.0, s.end()}, cfg, edges);
  traj.frame = Frame::lab();
  for (std::size_t k = 0; k < traj.size(); ++k)
    traj.states[k](kExciton) *= std::exp(-kI * p.omega_a * traj.times[k] / kHbar);
  return traj;
}

// RWA protocol: pulses integrated in a frame anchored at each pulse start,
// free evolution applied exactly. Samples are converted to the lab frame.
PureTrajectory z_protocol_rwa(const DotPairParams& p, const PulseEnvelope& pulse0,
                              const ZSchedule& s, const QuantumState& psi0,
                              const IntegratorConfig& cfg) {
  const PulseEnvelope env = pulse0.shifted(-pulse0.start());
  const double omega_l = p.omega_a;
  auto h = [&](double t) -> MatrixXc { return single_dot_coupling(0.5 * env(t)); };

  PureTrajectory out{psi0.basis(), Frame::lab(), {}, {}, {}, {}};
  auto append = [&](const PureTrajectory& part, double offset, auto&& to_lab) {
    for (std::size_t k = 0; k < part.size(); ++k) {
      const double t = part.times[k] + offset;
      if (!out.times.empty() && t <= out.times.back()) continue;
      out.times.push_back(t);
      out.states.push_back(to_lab(part.times[k], part.states[k]));
    }
    out.stats.accepted += part.stats.accepted;
    out.stats.rejected += part.stats.rejected;
    out.stats.rhs_calls += part.stats.rhs_calls;
  };
  auto rot_to_lab = [&](double local_t, VectorXc v) {
    v(kExciton) *= std::exp(-kI * omega_l * local_t / kHbar);
    return v;
  };

  const QuantumState start(psi0.amplitudes(), psi0.basis(), Frame::rotating(omega_l));
  const PureTrajectory first = evolve_schrodinger(h, start, {0.0, s.pulse}, cfg);
  append(first, 0.0, rot_to_lab);
  VectorXc lab = rot_to_lab(s.pulse, final_state(first, psi0.amplitudes()));

  if (s.free_time > 0.0) {
    PureTrajectory free{psi0.basis(), Frame::lab(), {}, {}, {}, {}};
    free.times = detail::sample_grid(0.0, s.free_time, cfg.sample_interval);
    for (double t : free.times) {
      VectorXc v = lab;
      v(kExciton) *= std::exp(-kI * p.omega_a * t / kHbar);
      free.states.push_back(std::move(v));
    }
    append(free, s.pulse, [](double, const VectorXc& v) { return v; });
    lab(kExciton) *= std::exp(-kI * p.omega_a * s.free_time / kHbar);
  }

  const QuantumState mid(lab, psi0.basis(), Frame::rotating(omega_l));
  const PureTrajectory second = evolve_schrodinger(h, mid, {0.0, s.pulse}, cfg);
  append(second, s.second_start(), rot_to_lab);
  if (out.empty()) {
    out.times.push_back(0.0);
    out.states.push_back(psi0.amplitudes());
  }
  return out;
}

PureTrajectory z_protocol(const DotPairParams& p, const PulseEnvelope& pulse, const ZSchedule& s,
                          const QuantumState& psi0, const IntegratorConfig& cfg, ZFrame frame) {
  return frame == ZFrame::Lab ? z_protocol_lab(p, pulse, s, psi0, cfg)
                              : z_protocol_rwa(p, pulse, s, psi0, cfg);
}

double relative_phase(const VectorXc& v) { return std::arg(v(kOne)) - std::arg(v(kZero)); }

}  // namespace

ZRotationResult run_z_rotation(const DotPairParams& p, const ZGateParams& z,
                               const IntegratorConfig& cfg, Complex a, Complex b, ZFrame frame) {
  p.validate();
  const double free_time = z.target_phase ? free_time_for_phase(p, *z.target_phase) : z.free_time;
  if (!(free_time >= 0.0)) throw std::invalid_argument("run_z_rotation: T_s must be >= 0");
  const double area = z.pi_pulse.area() / kHbar;
  if (std::abs(area - kPi) > 0.01 * kPi) {
    std::ostringstream msg;
    msg << "run_z_rotation: pulse area " << area << " rad is not within 1% of pi";
    throw std::invalid_argument(msg.str());
  }
  const double norm = std::sqrt(std::norm(a) + std::norm(b));
  if (!(norm > 0.0)) throw std::invalid_argument("run_z_rotation: zero input state");

  const Basis& dot = bases::single_dot();
  VectorXc in = VectorXc::Zero(3);
  in(kZero) = a / norm;
  in(kOne) = b / norm;
  VectorXc probe = VectorXc::Zero(3);
  probe(kZero) = probe(kOne) = 1.0 / std::sqrt(2.0);

  const ZSchedule sched{z.pi_pulse.duration(), free_time};
  const ZSchedule composite{z.pi_pulse.duration(), 0.0};

  ZRotationResult r{QuantumState(in, dot), free_time, 0.0, 0.0, 0.0, 0.0, false, {}};
  r.trajectory = z_protocol(p, z.pi_pulse, sched, QuantumState(in, dot), cfg, frame);
  r.final_state = QuantumState(r.trajectory.states.back(), dot);

  const PureTrajectory probe_run = z_protocol(p, z.pi_pulse, sched, QuantumState(probe, dot), cfg, frame);
  const PureTrajectory probe_ref =
      z_protocol(p, z.pi_pulse, composite, QuantumState(probe, dot), cfg, frame);
  const double total = relative_phase(probe_run.states.back());
  r.composite_phase = wrap_phase(relative_phase(probe_ref.states.back()));
  // |1⟩ picks up exp(−iφ) relative to |0⟩ for a rotation by +φ.
  r.achieved_phase = wrap_phase(-(total - r.composite_phase));
  r.expected_phase = wrap_phase(p.omega_a * free_time / kHbar);
  r.leakage = std::norm(r.final_state.amplitudes()(kExciton));
  r.leakage_flagged = r.leakage > 1e-2;
  return r;
}

double selectivity_fidelity(double rabi, double detuning) {
  if (detuning == 0.0) throw std::invalid_argument("selectivity_fidelity: detuning is zero");
  return std::clamp(1.0 - (rabi * rabi) / (detuning * detuning), 0.0, 1.0);
}

double pi_pulse_time(double rabi) {
  if (!(rabi > 0.0)) throw std::invalid_argument("pi_pulse_time: Rabi energy must be positive");
  return kPi * kHbar / rabi;
}

double rabi_for_pi_time(double duration) {
  if (!(duration > 0.0)) throw std::invalid_argument("rabi_for_pi_time: duration must be positive");
  return kPi * kHbar / duration;
}

double detuned_pi_pulse_error(double rabi, double detuning, const IntegratorConfig& cfg) {
  const double duration = pi_pulse_time(rabi);
  static const Basis two_level("detuned", {"1", "X"});
  auto h = [&](double) -> MatrixXc {
    MatrixXc m = MatrixXc::Zero(2, 2);
    m(1, 1) = detuning;
    m(0, 1) = m(1, 0) = 0.5 * rabi;
    return m;
  };
  const auto traj = evolve_schrodinger(h, QuantumState::basis_state(two_level, "1"),
                                       {0.0, duration}, cfg);
  double peak = 0.0;
  for (const auto& psi : traj.states) peak = std::max(peak, std::norm(psi(1)));
  return peak;
}

// ---------------------------------------------------------------------------

void RamanParams::validate() const {
  if (detuning == 0.0)
    throw std::invalid_argument("RamanParams: detuning must be non-zero for the detuned scheme");
  if (!(gamma >= 0.0)) throw std::invalid_argument("RamanParams: gamma must be >= 0");
  if (!(rabi > 0.0)) throw std::invalid_argument("RamanParams: rabi must be positive");
}

double RamanParams::estimated_gate_time() const {
  return target_angle * kHbar / std::abs(raman_rate());
}

Operator raman_hamiltonian(const RamanParams& r) {
  r.validate();
  const Basis& b = bases::lambda_dot();
  MatrixXc h = MatrixXc::Zero(4, 4);
  const auto e = b.index("e");
  h(e, e) = r.detuning;
  h(b.index("0"), e) = h(e, b.index("0")) = 0.5 * r.rabi;
  h(b.index("1"), e) = h(e, b.index("1")) = 0.5 * r.rabi;
  return {std::move(h), b, Frame::rotating(0.0), OperatorKind::Hamiltonian};
}

RamanRun run_raman_x(const RamanParams& r, const IntegratorConfig& cfg,
                     std::optional<double> window) {
  const Operator h = raman_hamiltonian(r);
  const Basis& b = bases::lambda_dot();
  const std::vector<CollapseChannel> channels{
      CollapseChannel(projector(b, "s", "e", h.frame()), r.gamma)};
  const DensityMatrix rho0 = DensityMatrix::from_pure(QuantumState::basis_state(b, "0", h.frame()));

  RamanRun run;
  run.estimated_gate_time = r.estimated_gate_time();
  const double t_end = window.value_or(1.5 * run.estimated_gate_time);
  if (!(t_end >= 0.0)) throw std::invalid_argument("run_raman_x: window must be >= 0");
  const MatrixXc hm = h.matrix();
  run.trajectory = evolve_lindblad([&](double) { return hm; }, rho0, channels, {0.0, t_end}, cfg);

  const double target_p1 = std::pow(std::sin(0.5 * r.target_angle), 2);
  const double target_p0 = 1.0 - target_p1;
  auto fidelity_at = [&](const MatrixXc& rho) {
    const double p0 = std::max(0.0, rho(0, 0).real());
    const double p1 = std::max(0.0, rho(1, 1).real());
    const double root = std::sqrt(p0 * target_p0) + std::sqrt(p1 * target_p1);
    return root * root;
  };

  const auto& traj = run.trajectory;
  std::size_t best = traj.size();
  double best_f = -1.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double t = traj.times[k];
    if (t < 0.5 * run.estimated_gate_time || t > 1.5 * run.estimated_gate_time) continue;
    const double f = fidelity_at(traj.states[k]);
    if (f > best_f) {
      best_f = f;
      best = k;
    }
  }
  const MatrixXc& rho = best < traj.size() ? traj.states[best] : rho0.matrix();
  run.gate_time = best < traj.size() ? traj.times[best] : 0.0;
  run.fidelity = fidelity_at(rho);
  for (std::size_t i = 0; i < 4; ++i) run.populations[i] = rho(i, i).real();
  run.lost_population = run.populations[3];
  return run;
}

}  // namespace qdgate
