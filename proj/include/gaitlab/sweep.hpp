#pragma once

#include <string>
#include <vector>

#include "gaitlab/geomech.hpp"
#include "gaitlab/parallel.hpp"
#include "gaitlab/simulate.hpp"
#include "gaitlab/stability.hpp"

namespace gaitlab {

struct SweepOptions {
  SweepMode mode = SweepMode::both;
  int steps_per_cycle = 128;
  int stability_samples = 720;
  int phi0_scan_points = 64;
};

/// Evaluate stability and speed surfaces over a (D, Phi_lat) grid. Cells run
/// on a bounded worker pool; results are stored by grid index so the output
/// is deterministic regardless of scheduling. Per-cell failures are recorded
/// and the sweep continues.
inline SweepResult sweep(const RobotSpec& spec, const std::vector<double>& duty_grid,
                         const std::vector<double>& phase_lag_grid,
                         const SweepOptions& opts = {}) {
  if (duty_grid.empty() || phase_lag_grid.empty())
    throw std::invalid_argument("sweep: empty parameter grid");
  for (double d : duty_grid)
    if (d < GaitParams::kMinDutyFactor || d > 1.0)
      throw std::invalid_argument("sweep: duty factor out of range");
  for (double p : phase_lag_grid)
    if (p < 0.0 || p >= 1.0)
      throw std::invalid_argument("sweep: lateral phase lag out of range");

  SweepResult result;
  result.duty_grid = duty_grid;
  result.phase_lag_grid = phase_lag_grid;
  result.cells.resize(duty_grid.size() * phase_lag_grid.size());

  parallel_for(result.cells.size(), [&](std::size_t idx) {
    const double d = duty_grid[idx / phase_lag_grid.size()];
    const double p = phase_lag_grid[idx % phase_lag_grid.size()];
    SweepCell cell;
    cell.duty_factor = d;
    cell.lateral_phase_lag = p;
    try {
      GaitParams fixed = GaitParams::for_robot(spec, d, p, UndulationMode::fixed_straight);
      const Trajectory traj = integrate_gait(spec, fixed, 1, opts.steps_per_cycle);
      if (traj.failed) throw SolverError(traj.failure_message);
      cell.blc_fixed = speed_blc(traj);

      GaitParams coord = GaitParams::for_robot(spec, d, p, UndulationMode::coordinated);
      if (opts.mode != SweepMode::fixed_straight) {
        // Inner phi_0 scan stays sequential; parallelism is per cell.
        const PhaseOptimum opt = [&] {
          std::vector<double> values(static_cast<std::size_t>(opts.phi0_scan_points));
          PhaseOptimum o{};
          GaitParams gg = coord;
          double best = -1.0;
          std::size_t best_k = 0;
          for (std::size_t k = 0; k < values.size(); ++k) {
            gg.phi_0 = k * kTwoPi / opts.phi0_scan_points;
            const Trajectory t = integrate_gait(spec, gg, 1, opts.steps_per_cycle);
            if (t.failed) throw SolverError(t.failure_message);
            values[k] = speed_blc(t);
            if (values[k] > best) {
              best = values[k];
              best_k = k;
            }
          }
          o.phi_0 = best_k * kTwoPi / opts.phi0_scan_points;
          o.displacement = best;
          return o;
        }();
        cell.phi0_opt = opt.phi_0;
        cell.blc_coordinated = opt.displacement;
      }

      GaitParams for_stability =
          spec.mode == MorphologyMode::sidewinder ? coord : fixed;
      for_stability.phi_0 = cell.phi0_opt;
      cell.stability = stability_metric(spec, for_stability, opts.stability_samples);
    } catch (const std::exception& e) {
      cell.failed = true;
      cell.error = e.what();
    }
    result.cells[idx] = cell;
  });
  return result;
}

}  // namespace gaitlab
