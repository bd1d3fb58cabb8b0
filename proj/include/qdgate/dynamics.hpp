#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qdgate/integrator.hpp"
#include "qdgate/operators.hpp"

namespace qdgate {

/// Time-dependent Hamiltonian matrix (meV) on a fixed basis.
using HamiltonianFn = std::function<MatrixXc(double)>;

/// Time-ordered samples of a state on a fixed basis and frame.
template <typename Sample>
struct Trajectory {
  Basis basis;
  Frame frame;
  std::vector<double> times;
  std::vector<Sample> states;
  std::map<std::string, double> metadata;
  IntegrationStats stats;

  std::size_t size() const noexcept { return times.size(); }
  bool empty() const noexcept { return times.empty(); }
};

using PureTrajectory = Trajectory<VectorXc>;
using MixedTrajectory = Trajectory<MatrixXc>;

/// Decay channel γ·D[L]. Rate in 1/ps.
struct CollapseChannel {
  Operator op;
  double rate;

  CollapseChannel(Operator op, double rate);
};

using TimeSpan = std::pair<double, double>;

/// Solves iħ dψ/dt = H(t)ψ with adaptive Dormand–Prince 5(4). Integration is
/// split at `breakpoints`. Throws std::invalid_argument when |‖psi0‖ − 1| > 1e−7
/// or H(t0) is not Hermitian; NumericalError from the stepper.
PureTrajectory evolve_schrodinger(const HamiltonianFn& h, const QuantumState& psi0, TimeSpan span,
                                  const IntegratorConfig& cfg = {},
                                  std::span<const double> breakpoints = {});

/// Solves dρ/dt = −(i/ħ)[H,ρ] + Σ γ_k D[L_k]ρ in full matrix form.
MixedTrajectory evolve_lindblad(const HamiltonianFn& h, const DensityMatrix& rho0,
                                std::span<const CollapseChannel> channels, TimeSpan span,
                                const IntegratorConfig& cfg = {},
                                std::span<const double> breakpoints = {});

/// Product of matrix exponentials over piecewise-constant intervals
/// [edges[k], edges[k+1]] with H sampled at each interval midpoint.
VectorXc propagate_piecewise(const HamiltonianFn& h, const VectorXc& psi0,
                             std::span<const double> edges);

/// Amplitudes below this magnitude have no usable phase.
inline constexpr double kPhaseFloor = 1e-10;

struct PhaseSeries {
  std::vector<double> times;
  std::vector<double> phase;        // unwrapped, radians
  std::vector<bool> interpolated;   // sample had |amplitude| < kPhaseFloor
  /// Adjacent defined samples jumped by more than π/2; resample more finely.
  bool needs_finer_sampling = false;

  double final_phase() const { return phase.empty() ? 0.0 : phase.back(); }
};

/// arg⟨label|ψ(t)⟩ continued along the nearest branch. Throws
/// std::invalid_argument if the amplitude never rises above kPhaseFloor.
PhaseSeries accumulated_phase(const PureTrajectory& traj, std::string_view label);

/// Worst-case invariant residuals over a trajectory.
struct TrajectoryCheck {
  double max_norm_error = 0.0;  // pure: |‖ψ‖ − 1|; mixed: |Tr ρ − 1|
  double min_eigenvalue = 1.0;  // mixed only
  double max_hermiticity_error = 0.0;
  bool strictly_increasing_times = true;
};

TrajectoryCheck check_trajectory(const PureTrajectory& traj);
TrajectoryCheck check_trajectory(const MixedTrajectory& traj);

/// State at the last sample, or `fallback` for an empty trajectory.
inline const VectorXc& final_state(const PureTrajectory& traj, const VectorXc& fallback) {
  return traj.empty() ? fallback : traj.states.back();
}

}  // namespace qdgate
