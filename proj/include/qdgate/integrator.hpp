#pragma once

// Dormand–Prince 5(4) with Hairer's fourth-order continuous extension.
// The state is any Eigen dense object (vector or matrix) with complex entries.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <sstream>
#include <vector>

#include "qdgate/errors.hpp"
#include "qdgate/linalg.hpp"

namespace qdgate {

struct IntegratorConfig {
  double rtol = 1e-9;
  double atol = 1e-12;
  double max_step = 1.0;          // ps
  double sample_interval = 0.01;  // ps
  std::size_t max_steps = 50'000'000;

  /// Throws std::invalid_argument unless tolerances, max_step and sample_interval are positive.
  void validate() const;
};

struct IntegrationStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_calls = 0;
};

namespace detail {

/// Sample grid t0, t0+Δ, ..., always ending exactly on t1. Empty for t1 == t0.
std::vector<double> sample_grid(double t0, double t1, double interval);

/// Interior breakpoints of (t0, t1), sorted and deduplicated.
std::vector<double> segment_edges(double t0, double t1, std::span<const double> breakpoints);

// Butcher tableau.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                        a75 = -2187.0 / 6784, a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

}  // namespace detail

/// Integrates dy/dt = f(t, y) from t0 to t1 and records y on the sample grid.
/// `f` is only ever evaluated inside the current segment between breakpoints;
/// a segment endpoint is replaced by the adjacent representable time so that
/// one-sided limits are used at jumps.
/// Throws NumericalError on step-size underflow, step budget exhaustion or a
/// non-finite state.
template <typename State, typename Rhs>
IntegrationStats integrate_dopri5(Rhs&& f, const State& y0, double t0, double t1,
                                  const IntegratorConfig& cfg, std::span<const double> breakpoints,
                                  std::vector<double>& sample_times, std::vector<State>& samples) {
  using namespace detail;
  cfg.validate();
  if (!(t1 >= t0)) throw std::invalid_argument("integration window must satisfy t1 >= t0");
  IntegrationStats stats;
  sample_times = sample_grid(t0, t1, cfg.sample_interval);
  samples.clear();
  samples.reserve(sample_times.size());
  if (sample_times.empty()) return stats;

  samples.push_back(y0);
  std::size_t next_sample = 1;
  std::vector<double> edges = segment_edges(t0, t1, breakpoints);
  edges.insert(edges.begin(), t0);
  edges.push_back(t1);

  State y = y0;
  State k1, k2, k3, k4, k5, k6, k7, ytmp, ynew, err;
  double h_next = std::min(cfg.max_step, 0.01 * (t1 - t0));

  for (std::size_t seg = 0; seg + 1 < edges.size(); ++seg) {
    const double lo = edges[seg];
    const double hi = edges[seg + 1];
    if (!(hi > lo)) continue;
    const double lo_in = std::nextafter(lo, hi);
    const double hi_in = std::nextafter(hi, lo);
    auto rhs = [&](double t, const State& s) {
      ++stats.rhs_calls;
      return f(std::clamp(t, lo_in, hi_in), s);
    };

    double t = lo;
    k1 = rhs(t, y);
    const double h_min = 1e-13 * std::max({std::abs(lo), std::abs(hi), 1.0});

    while (t < hi) {
      double h = h_next;
      bool last = false;
      if (t + h >= hi || hi - (t + h) < h_min) {
        h = hi - t;
        last = true;
      }
      if (h < h_min) {
        std::ostringstream msg;
        msg << "step size underflow at t=" << t << " ps (h=" << h
            << "); the problem is too stiff or oscillates too fast for this frame, "
               "consider integrating in the rotating frame";
        throw NumericalError(msg.str());
      }
      if (stats.accepted + stats.rejected >= cfg.max_steps)
        throw NumericalError("integrator step budget exhausted");

      ytmp = y + h * (a21 * k1);
      k2 = rhs(t + c2 * h, ytmp);
      ytmp = y + h * (a31 * k1 + a32 * k2);
      k3 = rhs(t + c3 * h, ytmp);
      ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
      k4 = rhs(t + c4 * h, ytmp);
      ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
      k5 = rhs(t + c5 * h, ytmp);
      ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
      k6 = rhs(t + h, ytmp);
      ynew = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
      k7 = rhs(t + h, ynew);
      err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

      const auto scale =
          (cfg.atol + cfg.rtol * y.cwiseAbs().cwiseMax(ynew.cwiseAbs()).array()).eval();
      const double err_norm =
          std::sqrt((err.cwiseAbs().array() / scale).square().sum() / static_cast<double>(y.size()));

      if (!std::isfinite(err_norm) || !ynew.allFinite()) {
        if (!y.allFinite()) throw NumericalError("non-finite state during integration");
        h_next = 0.2 * h;
        ++stats.rejected;
        continue;
      }

      if (err_norm <= 1.0) {
        ++stats.accepted;
        const double t_new = last ? hi : t + h;
        // Emit samples in (t, t_new] from the continuous extension.
        while (next_sample < sample_times.size() && sample_times[next_sample] <= t_new) {
          const double ts = sample_times[next_sample];
          if (ts == t_new) {
            samples.push_back(ynew);
          } else {
            const double th = (ts - t) / h;
            const double th1 = 1.0 - th;
            const State ydiff = ynew - y;
            const State bspl = h * k1 - ydiff;
            const State r4 = ydiff - h * k7 - bspl;
            const State r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
            samples.push_back(y + th * (ydiff + th1 * (bspl + th * (r4 + th1 * r5))));
          }
          ++next_sample;
        }
        y = ynew;
        k1 = k7;
        t = t_new;
        const double fac = err_norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0);
        if (!last || h * fac < h_next) h_next = std::min(h * fac, cfg.max_step);
      } else {
        ++stats.rejected;
        h_next = h * std::max(0.2, 0.9 * std::pow(err_norm, -0.2));
      }
    }
  }
  while (next_sample < sample_times.size()) {
    samples.push_back(y);
    ++next_sample;
  }
  return stats;
}

}  // namespace qdgate
