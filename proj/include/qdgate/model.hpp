#pragma once

#include <cmath>
#include <variant>
#include <vector>

#include "qdgate/operators.hpp"

namespace qdgate {

/// Physical constants of a resonant pair of singly charged dots (meV).
struct DotPairParams {
  double omega_a = 2.0e6;  // exciton creation energy, 2 eV
  double v_f = 0.85;       // Förster coupling
  double v_xx = 5.0;       // biexciton shift

  /// Throws std::invalid_argument on omega_a ≤ 0, v_f = 0 or v_xx = 2·v_f.
  void validate() const;

  /// V_XX − 2V_F, the detuning of |XX⟩ in the resonant rotating frame.
  double biexciton_detuning() const { return v_xx - 2.0 * v_f; }
  /// Carrier tuned to the |11⟩ ↔ |ψ₊⟩ transition.
  double resonant_carrier() const { return omega_a + v_f; }
};

struct SquarePulse {
  double amplitude = 0.0;  // meV
  double duration = 0.0;   // ps
  double start = 0.0;      // ps
};

struct GaussianPulse {
  double peak = 0.0;        // meV
  double sigma = 1.0;       // ps
  double center = 0.0;      // ps
  double truncation = 4.0;  // half-width of the support in units of sigma
};

/// Non-negative Rabi envelope Ω(t), zero outside its support.
class PulseEnvelope {
 public:
  using Shape = std::variant<SquarePulse, GaussianPulse>;

  explicit PulseEnvelope(Shape shape);

  static PulseEnvelope square(double amplitude, double duration, double start = 0.0);
  /// Support starts at `start`; the centre sits truncation·sigma later.
  static PulseEnvelope gaussian(double peak, double sigma, double truncation = 4.0,
                                double start = 0.0);
  /// Square pulse whose ∫Ω dt equals `area` (meV·ps).
  static PulseEnvelope square_with_area(double amplitude, double area, double start = 0.0);
  /// Gaussian with the given peak whose truncated ∫Ω dt equals `area`.
  static PulseEnvelope gaussian_with_area(double peak, double area, double truncation = 4.0,
                                          double start = 0.0);

  double operator()(double t) const;
  /// Closed-form ∫Ω dt over the support (meV·ps).
  double area() const;
  /// ∫Ω dt from the start of the support up to t.
  double area_until(double t) const;
  double peak() const;
  double start() const;
  double end() const;
  double duration() const { return end() - start(); }
  /// Times where Ω(t) or its derivative jumps; integration is split there.
  std::vector<double> edges() const;

  PulseEnvelope shifted(double dt) const;
  const Shape& shape() const noexcept { return shape_; }
  bool is_square() const noexcept { return std::holds_alternative<SquarePulse>(shape_); }

 private:
  Shape shape_;
};

enum class Polarization { SigmaPlus };

/// Classical laser field Ω(t)·cos(ω_l·(t − t_ref)/ħ).
struct LaserDrive {
  PulseEnvelope envelope;
  double omega_l = 0.0;               // carrier photon energy (meV)
  double phase_reference = 0.0;       // t_ref (ps) where the carrier phase is zero
  Polarization polarization = Polarization::SigmaPlus;

  double carrier(double t) const;
  /// Ω(t)·cos(...) at t.
  double field(double t) const { return envelope(t) * carrier(t); }
};

struct ConditionThresholds {
  double biexciton = 0.05;
  double spectator = 0.05;
};

/// Validity ratios of the perturbative picture evaluated at the pulse maximum.
struct ConditionReport {
  double r_biexciton = 0.0;  // (Ω′_max/2)/|V_XX − 2V_F|
  double r_spectator = 0.0;  // (Ω_max/2)/|V_F|
  double threshold_biexciton = 0.05;
  double threshold_spectator = 0.05;
  bool pass_biexciton = true;
  bool pass_spectator = true;

  bool passed() const { return pass_biexciton && pass_spectator; }
  friend bool operator==(const ConditionReport&, const ConditionReport&) = default;
};

/// √2·Ω: coupling to the symmetric single-exciton state.
inline double enhanced_rabi(double omega) { return std::sqrt(2.0) * omega; }

/// Full nine-level lab-frame Hamiltonian including the cos carrier (no RWA).
Operator full_hamiltonian(const DotPairParams& p, const LaserDrive& drive, double t);

/// Unitary whose columns are {|11⟩, |ψ₊⟩, |ψ₋⟩, |XX⟩} written on up_up_block.
Operator psi_rotation();

/// Lab-frame Hamiltonian of the doubly-up block in the {|11⟩,|ψ₊⟩,|ψ₋⟩,|XX⟩} basis.
Operator subspace_hamiltonian_psi_basis(const DotPairParams& p, const LaserDrive& drive, double t);

/// Excitation number of each psi_subspace level (0, 1, 1, 2).
Eigen::VectorXd psi_excitations();

/// Exact transform R·H·R† − ω_l·N with R = exp(i·ω_l·t·N/ħ), no terms dropped.
Operator rotating_frame_transform(const Operator& h, const Eigen::VectorXd& excitations,
                                  double omega_l, double t);

/// RWA Hamiltonian of the psi subspace with ω_l = ω_a + V_F.
Operator rwa_subspace_hamiltonian(const DotPairParams& p, const PulseEnvelope& envelope, double t);

/// Second-order effective Hamiltonian on {|11⟩, |ψ₊⟩}. Throws if V_XX = 2V_F;
/// warns on stderr when (Ω′/2)/|V_XX − 2V_F| ≥ 1.
Operator effective_hamiltonian(const DotPairParams& p, double omega_prime);

enum class Spectator {
  DotB,  // {|01⟩, |0X⟩}
  DotA,  // {|10⟩, |X0⟩}
};

/// Rotating-frame Hamiltonian of a singly-up branch with ω_l = ω_a + V_F.
Operator spectator_hamiltonian(const DotPairParams& p, const PulseEnvelope& envelope, double t,
                               Spectator which = Spectator::DotB);

/// Throws std::invalid_argument when either denominator vanishes.
ConditionReport check_conditions(const DotPairParams& p, const PulseEnvelope& envelope,
                                 ConditionThresholds thresholds = {});

}  // namespace qdgate
