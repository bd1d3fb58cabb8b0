#include "qdgate/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qdgate {

void IntegratorConfig::validate() const {
  if (!(rtol > 0.0) || !(atol > 0.0))
    throw std::invalid_argument("integrator tolerances must be positive");
  if (!(max_step > 0.0)) throw std::invalid_argument("max_step must be positive");
  if (!(sample_interval > 0.0)) throw std::invalid_argument("sample_interval must be positive");
}

namespace detail {

std::vector<double> sample_grid(double t0, double t1, double interval) {
  std::vector<double> grid;
  if (!(t1 > t0)) return grid;
  const double span = t1 - t0;
  const auto n = static_cast<std::size_t>(std::floor(span / interval + 1e-9));
  grid.reserve(n + 2);
  for (std::size_t k = 0; k <= n; ++k) grid.push_back(t0 + static_cast<double>(k) * interval);
  // Snap a grid point that lands on t1 up to rounding; otherwise append t1.
  if (t1 - grid.back() <= 1e-9 * interval && grid.size() > 1)
    grid.back() = t1;
  else
    grid.push_back(t1);
  return grid;
}

std::vector<double> segment_edges(double t0, double t1, std::span<const double> breakpoints) {
  std::vector<double> out;
  for (double b : breakpoints)
    if (b > t0 && b < t1) out.push_back(b);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace detail

CollapseChannel::CollapseChannel(Operator op_, double rate_) : op(std::move(op_)), rate(rate_) {
  if (!(rate >= 0.0)) throw std::invalid_argument("collapse rate must be non-negative");
}

PureTrajectory evolve_schrodinger(const HamiltonianFn& h, const QuantumState& psi0, TimeSpan span,
                                  const IntegratorConfig& cfg,
                                  std::span<const double> breakpoints) {
  if (std::abs(psi0.norm() - 1.0) > 1e-7)
    throw std::invalid_argument("evolve_schrodinger: initial state is not normalised");
  const auto n = static_cast<Eigen::Index>(psi0.basis().dim());
  const MatrixXc h0 = h(span.first);
  if (h0.rows() != n || h0.cols() != n)
    throw BasisMismatch("evolve_schrodinger: Hamiltonian dimension differs from state");
  if (!is_hermitian(h0, kHermitianTol))
    throw std::invalid_argument("evolve_schrodinger: H(t0) is not Hermitian");

  PureTrajectory traj{psi0.basis(), psi0.frame(), {}, {}, {}, {}};
  const Complex factor = -kI / kHbar;
  auto rhs = [&](double t, const VectorXc& psi) -> VectorXc { return factor * (h(t) * psi); };
  traj.stats = integrate_dopri5(rhs, psi0.amplitudes(), span.first, span.second, cfg, breakpoints,
                                traj.times, traj.states);
  return traj;
}

MixedTrajectory evolve_lindblad(const HamiltonianFn& h, const DensityMatrix& rho0,
                                std::span<const CollapseChannel> channels, TimeSpan span,
                                const IntegratorConfig& cfg,
                                std::span<const double> breakpoints) {
  const auto n = static_cast<Eigen::Index>(rho0.basis().dim());
  const MatrixXc h0 = h(span.first);
  if (h0.rows() != n || h0.cols() != n)
    throw BasisMismatch("evolve_lindblad: Hamiltonian dimension differs from state");
  if (!is_hermitian(h0, kHermitianTol))
    throw std::invalid_argument("evolve_lindblad: H(t0) is not Hermitian");

  // Fold the channels into L_k scaled by √γ_k and the anti-Hermitian part.
  std::vector<MatrixXc> jumps;
  MatrixXc decay = MatrixXc::Zero(n, n);
  for (const auto& ch : channels) {
    if (!(ch.op.basis() == rho0.basis()))
      throw BasisMismatch("evolve_lindblad: collapse operator on a different basis");
    MatrixXc l = std::sqrt(ch.rate) * ch.op.matrix();
    decay += l.adjoint() * l;
    jumps.push_back(std::move(l));
  }

  MixedTrajectory traj{rho0.basis(), rho0.frame(), {}, {}, {}, {}};
  auto rhs = [&](double t, const MatrixXc& rho) -> MatrixXc {
    const MatrixXc heff = h(t) / kHbar;
    MatrixXc out = -kI * (heff * rho - rho * heff) - 0.5 * (decay * rho + rho * decay);
    for (const auto& l : jumps) out.noalias() += l * rho * l.adjoint();
    return out;
  };
  traj.stats = integrate_dopri5(rhs, rho0.matrix(), span.first, span.second, cfg, breakpoints,
                                traj.times, traj.states);
  return traj;
}

VectorXc propagate_piecewise(const HamiltonianFn& h, const VectorXc& psi0,
                             std::span<const double> edges) {
  VectorXc psi = psi0;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    const double dt = edges[k + 1] - edges[k];
    const MatrixXc hk = h(0.5 * (edges[k] + edges[k + 1]));
    psi = unitary_exp(hk, dt, kHbar) * psi;
  }
  return psi;
}

PhaseSeries accumulated_phase(const PureTrajectory& traj, std::string_view label) {
  const auto idx = traj.basis.index(label);
  PhaseSeries out;
  out.times = traj.times;
  const std::size_t n = traj.size();
  out.phase.assign(n, 0.0);
  out.interpolated.assign(n, false);
  if (n == 0) return out;

  std::vector<std::size_t> defined;
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(traj.states[k](idx)) < kPhaseFloor)
      out.interpolated[k] = true;
    else
      defined.push_back(k);
  }
  if (defined.empty())
    throw std::invalid_argument("accumulated_phase: amplitude of '" + std::string(label) +
                                "' is zero over the whole trajectory");

  // Nearest-branch continuation over the samples with a defined phase.
  double prev = std::arg(traj.states[defined.front()](idx));
  out.phase[defined.front()] = prev;
  for (std::size_t j = 1; j < defined.size(); ++j) {
    const double raw = std::arg(traj.states[defined[j]](idx));
    const double step = wrap_phase(raw - prev);
    if (std::abs(step) > 0.5 * kPi) out.needs_finer_sampling = true;
    prev += step;
    out.phase[defined[j]] = prev;
  }

  // Fill undefined samples by linear interpolation between defined neighbours.
  for (std::size_t k = 0; k < n; ++k) {
    if (!out.interpolated[k]) continue;
    auto after = std::lower_bound(defined.begin(), defined.end(), k);
    if (after == defined.begin()) {
      out.phase[k] = out.phase[*after];
    } else if (after == defined.end()) {
      out.phase[k] = out.phase[defined.back()];
    } else {
      const std::size_t a = *(after - 1);
      const std::size_t b = *after;
      const double w = (out.times[k] - out.times[a]) / (out.times[b] - out.times[a]);
      out.phase[k] = (1.0 - w) * out.phase[a] + w * out.phase[b];
    }
  }
  return out;
}

namespace {

template <typename Sample>
bool times_increasing(const Trajectory<Sample>& traj) {
  return std::adjacent_find(traj.times.begin(), traj.times.end(),
                            [](double a, double b) { return !(b > a); }) == traj.times.end();
}

}  // namespace

TrajectoryCheck check_trajectory(const PureTrajectory& traj) {
  TrajectoryCheck c;
  c.strictly_increasing_times = times_increasing(traj);
  for (const auto& psi : traj.states)
    c.max_norm_error = std::max(c.max_norm_error, std::abs(psi.norm() - 1.0));
  return c;
}

TrajectoryCheck check_trajectory(const MixedTrajectory& traj) {
  TrajectoryCheck c;
  c.strictly_increasing_times = times_increasing(traj);
  for (const auto& rho : traj.states) {
    c.max_norm_error = std::max(c.max_norm_error, std::abs(rho.trace() - Complex(1.0)));
    c.max_hermiticity_error = std::max(c.max_hermiticity_error, max_abs(rho - rho.adjoint()));
    const MatrixXc herm = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<MatrixXc> eig(herm, Eigen::EigenvaluesOnly);
    c.min_eigenvalue = std::min(c.min_eigenvalue, eig.eigenvalues().minCoeff());
  }
  return c;
}

}  // namespace qdgate
