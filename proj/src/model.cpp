#include "qdgate/model.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>
#include <string>

namespace qdgate {

void DotPairParams::validate() const {
  if (!(omega_a > 0.0)) throw std::invalid_argument("omega_a must be positive");
  if (v_f == 0.0) throw std::invalid_argument("v_f must be non-zero for resonant operation");
  if (biexciton_detuning() == 0.0)
    throw std::invalid_argument("v_xx must differ from 2*v_f");
}

namespace {

constexpr double kSqrt2Pi = 2.5066282746310002;

struct EnvelopeChecker {
  void operator()(const SquarePulse& s) const {
    if (!(s.amplitude >= 0.0) || !(s.duration >= 0.0) || !std::isfinite(s.start))
      throw std::invalid_argument("square pulse needs amplitude >= 0 and duration >= 0");
  }
  void operator()(const GaussianPulse& g) const {
    if (!(g.peak >= 0.0) || !(g.sigma > 0.0) || !(g.truncation > 0.0) || !std::isfinite(g.center))
      throw std::invalid_argument("gaussian pulse needs peak >= 0, sigma > 0, truncation > 0");
  }
};

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

}  // namespace

PulseEnvelope::PulseEnvelope(Shape shape) : shape_(shape) { std::visit(EnvelopeChecker{}, shape_); }

PulseEnvelope PulseEnvelope::square(double amplitude, double duration, double start) {
  return PulseEnvelope(SquarePulse{amplitude, duration, start});
}

PulseEnvelope PulseEnvelope::gaussian(double peak, double sigma, double truncation, double start) {
  return PulseEnvelope(GaussianPulse{peak, sigma, start + truncation * sigma, truncation});
}

PulseEnvelope PulseEnvelope::square_with_area(double amplitude, double area, double start) {
  if (area == 0.0) return square(amplitude, 0.0, start);
  if (!(amplitude > 0.0)) throw std::invalid_argument("non-zero area needs a positive amplitude");
  return square(amplitude, area / amplitude, start);
}

PulseEnvelope PulseEnvelope::gaussian_with_area(double peak, double area, double truncation,
                                                double start) {
  if (!(peak > 0.0) || !(area > 0.0))
    throw std::invalid_argument("gaussian_with_area needs positive peak and area");
  const double sigma = area / (peak * kSqrt2Pi * std::erf(truncation / std::sqrt(2.0)));
  return gaussian(peak, sigma, truncation, start);
}

double PulseEnvelope::operator()(double t) const {
  return std::visit(Overloaded{
                        [t](const SquarePulse& s) {
                          return (t >= s.start && t <= s.start + s.duration) ? s.amplitude : 0.0;
                        },
                        [t](const GaussianPulse& g) {
                          const double x = (t - g.center) / g.sigma;
                          return std::abs(x) <= g.truncation ? g.peak * std::exp(-0.5 * x * x)
                                                             : 0.0;
                        },
                    },
                    shape_);
}

double PulseEnvelope::area() const {
  return std::visit(Overloaded{
                        [](const SquarePulse& s) { return s.amplitude * s.duration; },
                        [](const GaussianPulse& g) {
                          return g.peak * g.sigma * kSqrt2Pi *
                                 std::erf(g.truncation / std::sqrt(2.0));
                        },
                    },
                    shape_);
}

double PulseEnvelope::area_until(double t) const {
  return std::visit(
      Overloaded{
          [t](const SquarePulse& s) { return s.amplitude * std::clamp(t - s.start, 0.0, s.duration); },
          [t](const GaussianPulse& g) {
            const double x = std::clamp((t - g.center) / g.sigma, -g.truncation, g.truncation);
            const double r = 1.0 / std::sqrt(2.0);
            return 0.5 * g.peak * g.sigma * kSqrt2Pi * (std::erf(x * r) + std::erf(g.truncation * r));
          },
      },
      shape_);
}

double PulseEnvelope::peak() const {
  return std::visit(Overloaded{
                        [](const SquarePulse& s) { return s.duration > 0.0 ? s.amplitude : 0.0; },
                        [](const GaussianPulse& g) { return g.peak; },
                    },
                    shape_);
}

double PulseEnvelope::start() const {
  return std::visit(Overloaded{
                        [](const SquarePulse& s) { return s.start; },
                        [](const GaussianPulse& g) { return g.center - g.truncation * g.sigma; },
                    },
                    shape_);
}

double PulseEnvelope::end() const {
  return std::visit(Overloaded{
                        [](const SquarePulse& s) { return s.start + s.duration; },
                        [](const GaussianPulse& g) { return g.center + g.truncation * g.sigma; },
                    },
                    shape_);
}

std::vector<double> PulseEnvelope::edges() const { return {start(), end()}; }

PulseEnvelope PulseEnvelope::shifted(double dt) const {
  return std::visit(Overloaded{
                        [dt](SquarePulse s) {
                          s.start += dt;
                          return PulseEnvelope(s);
                        },
                        [dt](GaussianPulse g) {
                          g.center += dt;
                          return PulseEnvelope(g);
                        },
                    },
                    shape_);
}

double LaserDrive::carrier(double t) const {
  return std::cos(omega_l * (t - phase_reference) / kHbar);
}

namespace {

// Static pieces of the nine-level Hamiltonian, built once from projectors.
struct TwoDotOperators {
  MatrixXc exciton_number;  // |X⟩⟨X|⊗I + I⊗|X⟩⟨X|
  MatrixXc biexciton;       // |XX⟩⟨XX|
  MatrixXc forster;         // |1X⟩⟨X1| + H.c.
  MatrixXc dipole;          // |1⟩⟨X|⊗I + I⊗|1⟩⟨X| + H.c.

  TwoDotOperators() {
    const Basis& dot = bases::single_dot();
    const Basis& two = bases::two_dot();
    const Operator id = Operator::identity(dot);
    const Operator xx = projector(dot, "X", "X");
    const Operator lower = projector(dot, "1", "X");
    exciton_number = (tensor(xx, id) + tensor(id, xx)).matrix();
    biexciton = projector(two, "XX", "XX").matrix();
    const MatrixXc hop = projector(two, "1X", "X1").matrix();
    forster = hop + hop.adjoint();
    const MatrixXc d = (tensor(lower, id) + tensor(id, lower)).matrix();
    dipole = d + d.adjoint();
  }
};

const TwoDotOperators& two_dot_operators() {
  static const TwoDotOperators ops;
  return ops;
}

Operator hamiltonian(MatrixXc m, const Basis& basis, Frame frame) {
  return {std::move(m), basis, frame, OperatorKind::Hamiltonian};
}

}  // namespace

Operator full_hamiltonian(const DotPairParams& p, const LaserDrive& drive, double t) {
  const auto& ops = two_dot_operators();
  MatrixXc h = p.omega_a * ops.exciton_number + p.v_xx * ops.biexciton + p.v_f * ops.forster +
               drive.field(t) * ops.dipole;
  return hamiltonian(std::move(h), bases::two_dot(), Frame::lab());
}

Operator psi_rotation() {
  const double s = 1.0 / std::sqrt(2.0);
  MatrixXc u = MatrixXc::Zero(4, 4);
  // Rows: 11, 1X, X1, XX. Columns: 11, ψ₊, ψ₋, XX.
  u(0, 0) = 1.0;
  u(1, 1) = s;
  u(2, 1) = s;
  u(1, 2) = s;
  u(2, 2) = -s;
  u(3, 3) = 1.0;
  return {std::move(u), bases::psi_subspace()};
}

Operator subspace_hamiltonian_psi_basis(const DotPairParams& p, const LaserDrive& drive,
                                        double t) {
  const double coupling = enhanced_rabi(drive.envelope(t)) * drive.carrier(t);
  MatrixXc h = MatrixXc::Zero(4, 4);
  h(1, 1) = p.omega_a + p.v_f;
  h(2, 2) = p.omega_a - p.v_f;
  h(3, 3) = 2.0 * p.omega_a + p.v_xx;
  h(0, 1) = h(1, 0) = coupling;
  h(1, 3) = h(3, 1) = coupling;
  return hamiltonian(std::move(h), bases::psi_subspace(), Frame::lab());
}

Eigen::VectorXd psi_excitations() { return Eigen::Vector4d(0.0, 1.0, 1.0, 2.0); }

Operator rotating_frame_transform(const Operator& h, const Eigen::VectorXd& excitations,
                                  double omega_l, double t) {
  const auto n = static_cast<Eigen::Index>(h.dim());
  if (excitations.size() != n)
    throw BasisMismatch("rotating_frame_transform: excitation vector has wrong length");
  MatrixXc out(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k)
      out(j, k) = h(j, k) * std::exp(kI * (omega_l * t * (excitations(j) - excitations(k)) / kHbar));
  out.diagonal() -= (omega_l * excitations).cast<Complex>();
  return {std::move(out), h.basis(), Frame::rotating(omega_l), h.kind()};
}

Operator rwa_subspace_hamiltonian(const DotPairParams& p, const PulseEnvelope& envelope, double t) {
  const double half = 0.5 * enhanced_rabi(envelope(t));
  MatrixXc h = MatrixXc::Zero(4, 4);
  h(2, 2) = -2.0 * p.v_f;
  h(3, 3) = p.biexciton_detuning();
  h(0, 1) = h(1, 0) = half;
  h(1, 3) = h(3, 1) = half;
  return hamiltonian(std::move(h), bases::psi_subspace(), Frame::rotating(p.resonant_carrier()));
}

Operator effective_hamiltonian(const DotPairParams& p, double omega_prime) {
  const double detuning = p.biexciton_detuning();
  if (detuning == 0.0)
    throw std::invalid_argument("effective_hamiltonian: V_XX = 2 V_F leaves no energy gap");
  const double ratio = 0.5 * std::abs(omega_prime) / std::abs(detuning);
  if (ratio >= 1.0)
    std::cerr << "warning: effective_hamiltonian outside its validity range (ratio " << ratio
              << ")\n";
  static const Basis reduced("effective", {"11", "psi_p"});
  MatrixXc h = MatrixXc::Zero(2, 2);
  h(1, 1) = -omega_prime * omega_prime / (4.0 * detuning);
  h(0, 1) = h(1, 0) = 0.5 * omega_prime;
  return hamiltonian(std::move(h), reduced, Frame::rotating(p.resonant_carrier()));
}

Operator spectator_hamiltonian(const DotPairParams& p, const PulseEnvelope& envelope, double t,
                               Spectator which) {
  MatrixXc h = MatrixXc::Zero(2, 2);
  h(1, 1) = -p.v_f;
  h(0, 1) = h(1, 0) = 0.5 * envelope(t);
  const Basis& basis = which == Spectator::DotB ? bases::spectator_b() : bases::spectator_a();
  return hamiltonian(std::move(h), basis, Frame::rotating(p.resonant_carrier()));
}

ConditionReport check_conditions(const DotPairParams& p, const PulseEnvelope& envelope,
                                 ConditionThresholds thresholds) {
  if (p.biexciton_detuning() == 0.0)
    throw std::invalid_argument("check_conditions: V_XX - 2 V_F is zero");
  if (p.v_f == 0.0) throw std::invalid_argument("check_conditions: V_F is zero");
  const double omega_max = envelope.peak();
  ConditionReport r;
  r.r_biexciton = 0.5 * enhanced_rabi(omega_max) / std::abs(p.biexciton_detuning());
  r.r_spectator = 0.5 * omega_max / std::abs(p.v_f);
  r.threshold_biexciton = thresholds.biexciton;
  r.threshold_spectator = thresholds.spectator;
  r.pass_biexciton = r.r_biexciton <= thresholds.biexciton;
  r.pass_spectator = r.r_spectator <= thresholds.spectator;
  return r;
}

}  // namespace qdgate
