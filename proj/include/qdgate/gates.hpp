#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qdgate/dynamics.hpp"
#include "qdgate/model.hpp"

namespace qdgate {

/// Computational branches in report order.
inline constexpr std::array<const char*, 4> kComputationalLabels{"00", "01", "10", "11"};

/// Outcome of a two-qubit phase gate. Phases are final unwrapped values in
/// the rotating frame; `block(m, n)` is ⟨m|ψ_n(T)⟩ for computational m, n.
struct GateReport {
  std::array<double, 4> phi{};
  std::array<double, 4> populations{};
  std::array<double, 4> leakage{};  // per input branch
  Eigen::Matrix4cd block = Eigen::Matrix4cd::Identity();
  double theta = 0.0;
  double fidelity = 1.0;
  double gate_time = 0.0;  // ps
  ConditionReport conditions;
  /// Post-gate residual populations of non-computational levels, keyed by label.
  std::map<std::string, double> residuals;
  std::vector<std::string> warnings;

  double mean_leakage() const;
  friend bool operator==(const GateReport&, const GateReport&) = default;
};

struct CphaseOptions {
  ConditionThresholds thresholds;
  /// Allowed relative deviation of ∫Ω′dt from 2πħ.
  double area_tolerance = 0.01;
};

struct CphaseRun {
  GateReport report;
  /// Branch trajectories in kComputationalLabels order, each on its own subspace basis.
  std::array<PureTrajectory, 4> branches;
  std::array<PhaseSeries, 4> phases;
};

/// Pulse area ∫Ω′dt/ħ of an envelope in radians.
double cphase_pulse_area(const PulseEnvelope& envelope);

/// Evolves the four computational inputs under their rotating-frame subspace
/// Hamiltonians. Throws std::invalid_argument when the area is neither zero
/// nor within `area_tolerance` of 2π.
CphaseRun run_cphase(const DotPairParams& p, const PulseEnvelope& envelope,
                     const IntegratorConfig& cfg = {}, const CphaseOptions& options = {});

/// Perturbative |11⟩ evolution: (cos(A/2), −i·e^{−iω_l t/ħ}·sin(A/2)) with
/// ω_l = ω_a + V_F for pulse area A. In the rotating frame the carrier phase
/// factor is dropped.
std::pair<Complex, Complex> analytic_11_evolution(const DotPairParams& p, double area, double t,
                                                  Frame::Kind frame = Frame::Kind::Rotating);

/// θ = φ₀₀ − φ₀₁ − φ₁₀ + φ₁₁ wrapped into (−π, π].
double entangling_phase(const GateReport& report);
double entangling_phase(const std::array<double, 4>& phi);

/// |Tr(U†·M)|²/16 against U = diag(1, 1, 1, −1).
double cphase_fidelity(const GateReport& report);
double cphase_fidelity(const Eigen::Matrix4cd& block);

/// A drive whose spectator branches complete whole generalised Rabi periods
/// exactly when |11⟩ completes its 2π cycle. This is one reading of the
/// "commensurate periods" condition: it solves √(Ω²+V_F²)·T = 2πħn together
/// with √2·Ω·T = 2πħ for the integer n closest to the requested amplitude.
struct CommensurateDrive {
  double rabi;       // meV
  double gate_time;  // ps
  int spectator_periods;
};
CommensurateDrive commensurate_drive(const DotPairParams& p, double requested_rabi);

// ---------------------------------------------------------------------------
// Single-qubit Z rotation: π-pulse, free evolution T_s, π-pulse.

enum class ZFrame {
  Rwa,  // pulses in their own rotating frame, free evolution exact
  Lab,  // full carrier, no RWA; only practical at reduced ω_a
};

struct ZGateParams {
  double free_time = 0.0;  // T_s, ps
  PulseEnvelope pi_pulse = PulseEnvelope::square(0.0, 0.0);
  /// When set, T_s is replaced by the smallest time giving this rotation.
  std::optional<double> target_phase;
};

struct ZRotationResult {
  QuantumState final_state;
  double free_time = 0.0;
  /// Rotation angle from the free evolution, wrapped into (−π, π].
  double achieved_phase = 0.0;
  /// Relative |1⟩ phase imprinted by the two pulses alone (T_s = 0).
  double composite_phase = 0.0;
  /// ω_a·T_s/ħ wrapped into (−π, π].
  double expected_phase = 0.0;
  double leakage = 0.0;
  bool leakage_flagged = false;
  PureTrajectory trajectory;
};

/// Smallest T_s ≥ 0 with ω_a·T_s/ħ ≡ phi (mod 2π).
double free_time_for_phase(const DotPairParams& p, double phi);

/// Input a|0⟩ + b|1⟩ on the single-dot basis. Throws std::invalid_argument if
/// the π-pulse area is off by more than 1% or T_s < 0.
ZRotationResult run_z_rotation(const DotPairParams& p, const ZGateParams& z,
                               const IntegratorConfig& cfg = {},
                               Complex a = Complex(1.0 / std::sqrt(2.0)),
                               Complex b = Complex(1.0 / std::sqrt(2.0)),
                               ZFrame frame = ZFrame::Rwa);

/// 1 − Ω²/δ², clamped to [0, 1]. Throws std::invalid_argument for δ = 0.
double selectivity_fidelity(double rabi, double detuning);
/// Square π-pulse duration πħ/Ω.
double pi_pulse_time(double rabi);
/// Rabi energy of a square π-pulse lasting `duration`.
double rabi_for_pi_time(double duration);
/// Peak excitation of a detuned dot during a square π-pulse aimed at a
/// resonant neighbour, from direct integration.
double detuned_pi_pulse_error(double rabi, double detuning, const IntegratorConfig& cfg = {});

// ---------------------------------------------------------------------------
// Raman X rotation on a Λ-system {|0⟩, |1⟩, |e⟩, |s⟩}.

struct RamanParams {
  double rabi = 1.33;        // per laser, meV
  double detuning = 8.0;     // one-photon detuning ν, meV
  double gamma = 1.0;        // |e⟩ → |s⟩ decay rate, 1/ps
  double target_angle = kPi;

  /// Throws std::invalid_argument for ν = 0, γ < 0 or Ω ≤ 0.
  void validate() const;
  /// Ω²/(2ν), meV.
  double raman_rate() const { return rabi * rabi / (2.0 * detuning); }
  /// target_angle·ħ/|Ω_R|, ps.
  double estimated_gate_time() const;
};

/// Rotating-frame Λ-system Hamiltonian (two-photon resonant).
Operator raman_hamiltonian(const RamanParams& r);

struct RamanRun {
  MixedTrajectory trajectory;
  double estimated_gate_time = 0.0;
  double gate_time = 0.0;
  /// Population fidelity to the ideal rotation of |0⟩ at gate_time; equals P₁ for a π rotation.
  double fidelity = 0.0;
  /// Population in the sink at gate_time.
  double lost_population = 0.0;
  std::array<double, 4> populations{};  // P₀, P₁, P_e, P_s at gate_time
};

/// Lindblad evolution from |0⟩ over `window` (default 1.5× the estimate). The
/// gate time is the fidelity maximum within [0.5, 1.5]× the estimate.
RamanRun run_raman_x(const RamanParams& r, const IntegratorConfig& cfg = {},
                     std::optional<double> window = std::nullopt);

}  // namespace qdgate
