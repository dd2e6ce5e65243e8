#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "gaitlab/contact_mechanics.hpp"
#include "gaitlab/core.hpp"
#include "gaitlab/gait.hpp"
#include "gaitlab/morphology.hpp"

namespace gaitlab {

/// Planar trajectory over an integer number of gait cycles. Poses are world
/// frame, starting from the identity; t is the contact phase.
struct Trajectory {
  struct Sample {
    double t = 0.0;
    Pose2 pose;
  };
  std::vector<Sample> samples;
  Pose2 per_cycle;                        // displacement over the first cycle
  std::vector<double> no_support_phases;  // phases advanced with xi = 0
  bool failed = false;                    // solver failure truncated the run
  std::string failure_message;

  const Pose2& final_pose() const { return samples.back().pose; }
};

/// Net per-cycle translation in body lengths per cycle.
inline double speed_blc(const Trajectory& traj) {
  if (traj.samples.empty() || traj.samples.back().t < kTwoPi - 1e-9)
    throw std::invalid_argument("speed_blc: trajectory covers less than one cycle");
  return std::hypot(traj.per_cycle.x, traj.per_cycle.y);
}

namespace detail {

/// One RK4 step of dg = TeL_g * xi(phi) over [phi, phi + h], with the
/// contact set frozen (supplied via contact_phase).
template <typename XiFn>
inline Pose2 rk4_step(const Pose2& g0, double phi, double h, XiFn&& xi_at) {
  auto deriv = [&](const Pose2& g, double ph) -> std::array<double, 3> {
    const BodyVelocity xi = xi_at(ph);
    const double c = std::cos(g.heading), s = std::sin(g.heading);
    return {c * xi.x - s * xi.y, s * xi.x + c * xi.y, xi.theta};
  };
  const auto k1 = deriv(g0, phi);
  const Pose2 g2{g0.x + 0.5 * h * k1[0], g0.y + 0.5 * h * k1[1], g0.heading + 0.5 * h * k1[2]};
  const auto k2 = deriv(g2, phi + 0.5 * h);
  const Pose2 g3{g0.x + 0.5 * h * k2[0], g0.y + 0.5 * h * k2[1], g0.heading + 0.5 * h * k2[2]};
  const auto k3 = deriv(g3, phi + 0.5 * h);
  const Pose2 g4{g0.x + h * k3[0], g0.y + h * k3[1], g0.heading + h * k3[2]};
  const auto k4 = deriv(g4, phi + h);
  return {g0.x + h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
          g0.y + h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]),
          g0.heading + h / 6.0 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])};
}

}  // namespace detail

/// Integrate the reduced equations of motion over whole gait cycles with
/// fixed-step RK4 in phi_c. Steps are aligned to the contact-switch events
/// so every evaluation sees a smooth right-hand side; within each piece the
/// contact set is frozen at the piece midpoint. Phases without support
/// advance with xi = 0 and are flagged.
inline Trajectory integrate_gait(const RobotSpec& spec, const GaitParams& g, int cycles,
                                 int steps_per_cycle = 256) {
  g.validate();
  if (cycles < 1) throw std::invalid_argument("integrate_gait: cycles must be >= 1");
  if (steps_per_cycle < 64)
    throw std::invalid_argument("integrate_gait: steps_per_cycle must be >= 64");

  // Piece boundaries: contact switches plus the cycle endpoints.
  std::vector<double> bounds = contact_switch_phases(spec, g);
  if (bounds.empty() || bounds.front() > 1e-12) bounds.insert(bounds.begin(), 0.0);
  if (kTwoPi - bounds.back() > 1e-12) bounds.push_back(kTwoPi);
  else bounds.back() = kTwoPi;

  Trajectory traj;
  Pose2 pose;
  traj.samples.push_back({0.0, pose});
  const double hmax = kTwoPi / steps_per_cycle;

  for (int cycle = 0; cycle < cycles && !traj.failed; ++cycle) {
    const double phase0 = cycle * kTwoPi;
    for (std::size_t piece = 0; piece + 1 < bounds.size() && !traj.failed; ++piece) {
      const double a = bounds[piece], b = bounds[piece + 1];
      const double mid = 0.5 * (a + b);
      const ShapePoint p_mid{mid, mid + g.phi_0};
      const Configuration cfg_mid = configuration_at(spec, g, p_mid);

      bool any_contact = false;
      for (int c : cfg_mid.contact_left) any_contact |= (c != 0);
      for (int c : cfg_mid.contact_right) any_contact |= (c != 0);
      if (!any_contact) {
        traj.no_support_phases.push_back(phase0 + mid);
        traj.samples.push_back({phase0 + b, pose});
        continue;
      }

      auto xi_at = [&](double phi) -> BodyVelocity {
        return solve_body_velocity(spec, g, {phi, phi + g.phi_0}, {1.0, 1.0}, mid);
      };

      const int n = std::max(1, static_cast<int>(std::ceil((b - a) / hmax)));
      const double h = (b - a) / n;
      try {
        for (int k = 0; k < n; ++k)
          pose = detail::rk4_step(pose, a + k * h, h, xi_at);
      } catch (const SolverError& e) {
        traj.failed = true;
        traj.failure_message = e.what();
      }
      traj.samples.push_back({phase0 + b, pose});
    }
    if (cycle == 0) traj.per_cycle = pose;
  }
  return traj;
}

enum class SweepMode { fixed_straight, coordinated, both };

struct SweepCell {
  double duty_factor = 0.0;
  double lateral_phase_lag = 0.0;
  double stability = 0.0;
  double blc_fixed = 0.0;
  double phi0_opt = 0.0;
  double blc_coordinated = 0.0;
  bool failed = false;
  std::string error;
};

struct SweepResult {
  std::vector<double> duty_grid;
  std::vector<double> phase_lag_grid;
  std::vector<SweepCell> cells;  // row-major: duty index * n_phase + phase index

  const SweepCell& at(std::size_t di, std::size_t pi) const {
    return cells[di * phase_lag_grid.size() + pi];
  }
};

}  // namespace gaitlab
