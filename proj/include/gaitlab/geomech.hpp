#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "gaitlab/contact_mechanics.hpp"
#include "gaitlab/core.hpp"
#include "gaitlab/gait.hpp"
#include "gaitlab/parallel.hpp"
#include "gaitlab/simulate.hpp"

namespace gaitlab {

/// Linear gait path phi_b = phi_c + phi_0 with winding numbers (1, 1) on the
/// torus; the only path family supported.
struct GaitPath {
  double phi_0 = 0.0;
  int winding_c = 1;
  int winding_b = 1;

  void validate() const {
    if (winding_c != 1 || winding_b != 1)
      throw std::invalid_argument("GaitPath: only (1,1)-winding paths are supported");
  }
};

/// Periodic samples of the local connection columns and their curl over the
/// (phi_c, phi_b) torus. Samples sit at half-cell offsets so no grid point
/// lands on a contact switch. `circulation` holds the line integrals along
/// the two assistive circles (phi_b = 0 and phi_c = cut_index * cell), one
/// value per body-velocity component.
struct HeightField {
  int resolution = 0;
  // Row-major grids indexed [component][i * R + j], i over phi_c, j over
  // phi_b.
  std::array<std::vector<double>, 3> a_c;   // connection column for dphi_c
  std::array<std::vector<double>, 3> a_b;   // connection column for dphi_b
  std::array<std::vector<double>, 3> curl;  // dA_b/dphi_c - dA_c/dphi_b
  int cut_index = 0;
  std::array<double, 3> circulation{0.0, 0.0, 0.0};

  double cell() const { return kTwoPi / resolution; }
  double phi_at(int k) const { return (k + 0.5) * cell(); }
};

namespace detail {

/// Pick the phi_c grid line (cell edge) farthest from any contact switch, so
/// the assistive cut never sits on a discontinuity of the connection.
inline int pick_cut_index(const RobotSpec& spec, const GaitParams& g, int resolution) {
  const std::vector<double> switches = contact_switch_phases(spec, g);
  if (switches.empty()) return 0;
  const double h = kTwoPi / resolution;
  int best = 0;
  double best_dist = -1.0;
  for (int m = 0; m < resolution; ++m) {
    const double x = m * h;
    double dist = kTwoPi;
    for (double s : switches) {
      double d = std::fabs(wrap_pi(x - s));
      dist = std::min(dist, d);
    }
    if (dist > best_dist) {
      best_dist = dist;
      best = m;
    }
  }
  return best;
}

/// Area fraction of the unit cell [0,1]^2 (scaled coords) on the positive
/// side of s(u, v) = v - u - c > 0, where c is in cell units.
inline double half_plane_fraction(double c) {
  // Corner values of s at (0,0), (1,0), (0,1), (1,1): -c, -1-c, 1-c, -c.
  if (c >= 1.0) return 0.0;
  if (c <= -1.0) return 1.0;
  if (c >= 0.0) {
    const double t = 1.0 - c;  // s > 0 only near corner (0,1)
    return 0.5 * t * t;
  }
  const double t = 1.0 + c;  // s < 0 only near corner (1,0)
  return 1.0 - 0.5 * t * t;
}

}  // namespace detail

/// Sample the local connection over an R x R half-cell-offset grid and form
/// the three height functions by periodic central differences. The Coulomb
/// response is homogeneous but not additive across shape directions, so the
/// components are stored path-aligned: a_b is the phi_b column and a_c is
/// the directionally exact diagonal solve minus a_b. Along any (1,1) path
/// the line integral (a_c + a_b) ds then reproduces the exact directional
/// connection, which keeps the Stokes estimate faithful to the ODE.
/// Aborts if more than 1% of the grid points fail to solve.
inline HeightField compute_height_field(const RobotSpec& spec, const GaitParams& g,
                                        int resolution = 128) {
  g.validate();
  if (resolution < 32)
    throw std::invalid_argument("compute_height_field: resolution must be >= 32");
  const int R = resolution;

  HeightField field;
  field.resolution = R;
  for (int c = 0; c < 3; ++c) {
    field.a_c[static_cast<std::size_t>(c)].assign(static_cast<std::size_t>(R) * R, 0.0);
    field.a_b[static_cast<std::size_t>(c)].assign(static_cast<std::size_t>(R) * R, 0.0);
    field.curl[static_cast<std::size_t>(c)].assign(static_cast<std::size_t>(R) * R, 0.0);
  }

  std::vector<int> failed(static_cast<std::size_t>(R) * R, 0);
  parallel_for(static_cast<std::size_t>(R) * R, [&](std::size_t idx) {
    const int i = static_cast<int>(idx) / R;
    const int j = static_cast<int>(idx) % R;
    const ShapePoint p{field.phi_at(i), field.phi_at(j)};
    try {
      const ContactSnapshot snap = build_contact_snapshot(spec, g, p);
      if (snap.contacts.empty()) throw NoSupportError("no contacts");
      const BodyVelocity diag = solve_body_velocity(spec.friction, snap, {1.0, 1.0});
      const BodyVelocity col_b = solve_body_velocity(spec.friction, snap, {0.0, 1.0});
      const double ab[3] = {col_b.x, col_b.y, col_b.theta};
      const double ac[3] = {diag.x - col_b.x, diag.y - col_b.y, diag.theta - col_b.theta};
      for (int c = 0; c < 3; ++c) {
        field.a_c[static_cast<std::size_t>(c)][idx] = ac[c];
        field.a_b[static_cast<std::size_t>(c)][idx] = ab[c];
      }
    } catch (const NoSupportError&) {
      // No-support cells contribute zero body velocity, matching the
      // integrator's convention.
    } catch (const SolverError&) {
      failed[idx] = 1;
    }
  });

  std::vector<std::size_t> failures;
  for (std::size_t idx = 0; idx < failed.size(); ++idx)
    if (failed[idx]) failures.push_back(idx);
  if (failures.size() * 100 > static_cast<std::size_t>(R) * R) {
    std::ostringstream msg;
    msg << "compute_height_field: " << failures.size() << " grid solves failed at points:";
    for (std::size_t k = 0; k < std::min<std::size_t>(failures.size(), 16); ++k)
      msg << " (" << failures[k] / static_cast<std::size_t>(R) << ","
          << failures[k] % static_cast<std::size_t>(R) << ")";
    throw SolverError(msg.str());
  }

  const double h = field.cell();
  for (int c = 0; c < 3; ++c) {
    const auto& ac = field.a_c[static_cast<std::size_t>(c)];
    const auto& ab = field.a_b[static_cast<std::size_t>(c)];
    auto& curl = field.curl[static_cast<std::size_t>(c)];
    for (int i = 0; i < R; ++i) {
      const int ip = (i + 1) % R, im = (i + R - 1) % R;
      for (int j = 0; j < R; ++j) {
        const int jp = (j + 1) % R, jm = (j + R - 1) % R;
        curl[static_cast<std::size_t>(i * R + j)] =
            (ab[static_cast<std::size_t>(ip * R + j)] - ab[static_cast<std::size_t>(im * R + j)] -
             ac[static_cast<std::size_t>(i * R + jp)] + ac[static_cast<std::size_t>(i * R + jm)]) /
            (2.0 * h);
      }
    }
  }

  field.cut_index = detail::pick_cut_index(spec, g, R);
  const int m = field.cut_index;
  for (int c = 0; c < 3; ++c) {
    const auto& ac = field.a_c[static_cast<std::size_t>(c)];
    const auto& ab = field.a_b[static_cast<std::size_t>(c)];
    double circ = 0.0;
    for (int i = 0; i < R; ++i)
      circ += 0.5 * (ac[static_cast<std::size_t>(i * R)] +
                     ac[static_cast<std::size_t>(i * R + R - 1)]) * h;
    const int m_prev = (m + R - 1) % R;
    for (int j = 0; j < R; ++j)
      circ += 0.5 * (ab[static_cast<std::size_t>(m * R + j)] +
                     ab[static_cast<std::size_t>(m_prev * R + j)]) * h;
    field.circulation[static_cast<std::size_t>(c)] = circ;
  }
  return field;
}

/// Stokes estimate of the per-cycle displacement of a (1,1) gait path: the
/// height-function integral over the lower-right corner region minus the
/// upper-left corner region of the unwrapped square, plus the circulation
/// along the two assistive circles. Region coverage of each cell is exact
/// (half-plane clipping), so the quadrature converges with the grid.
inline std::array<double, 3> stokes_displacement(const HeightField& field, const GaitPath& path) {
  path.validate();
  const int R = field.resolution;
  if (R <= 0) throw std::invalid_argument("stokes_displacement: empty height field");
  const double h = field.cell();
  const double psi = wrap_2pi(field.cut_index * h + path.phi_0);

  std::array<double, 3> out = field.circulation;
  for (int i = 0; i < R; ++i) {
    const int iu = (i - field.cut_index + R) % R;  // cell index along u
    for (int j = 0; j < R; ++j) {
      // Cell spans u in [iu, iu+1]*h, v in [j, j+1]*h. Line in cell units:
      // v - u = psi (upper-left side positive) and v - u = psi - 2*pi
      // (lower-right side negative).
      const double c_ul = (psi - (j - iu) * h) / h;
      const double c_lr = ((psi - kTwoPi) - (j - iu) * h) / h;
      const double frac_ul = detail::half_plane_fraction(c_ul);
      const double frac_lr = 1.0 - detail::half_plane_fraction(c_lr);
      const double w = (frac_ul - frac_lr) * h * h;
      if (w == 0.0) continue;
      for (int c = 0; c < 3; ++c)
        out[static_cast<std::size_t>(c)] +=
            w * field.curl[static_cast<std::size_t>(c)][static_cast<std::size_t>(i * R + j)];
    }
  }
  return out;
}

/// Predicted body-leg phasing (Phi_lat + 1/2) * pi, reduced mod 2*pi.
inline double phase_relation_prediction(double lateral_phase_lag) {
  if (!(lateral_phase_lag >= 0.0 && lateral_phase_lag < 1.0))
    throw std::invalid_argument("phase_relation_prediction: Phi_lat must be in [0, 1)");
  return wrap_2pi((lateral_phase_lag + 0.5) * kPi);
}

struct PhaseOptimum {
  double phi_0 = 0.0;
  double displacement = 0.0;  // BLC at the optimum
};

/// Maximize per-cycle displacement over the body-leg phase offset phi_0:
/// 64-point grid scan followed by golden-section refinement to 1e-3 rad.
/// Direct simulation is the objective; the Stokes estimate is a cross-check
/// only. Ties break toward the smallest phi_0.
inline PhaseOptimum optimize_phase_offset(const RobotSpec& spec, GaitParams g,
                                          int steps_per_cycle = 128, int scan_points = 64) {
  if (g.undulation != UndulationMode::coordinated)
    throw std::invalid_argument("optimize_phase_offset: requires coordinated undulation");

  auto objective = [&](double phi0) {
    GaitParams gg = g;
    gg.phi_0 = wrap_2pi(phi0);
    const Trajectory traj = integrate_gait(spec, gg, 1, steps_per_cycle);
    if (traj.failed) throw SolverError("optimize_phase_offset: " + traj.failure_message);
    return speed_blc(traj);
  };

  std::vector<double> values(static_cast<std::size_t>(scan_points));
  parallel_for(values.size(), [&](std::size_t k) {
    values[k] = objective(k * kTwoPi / scan_points);
  });

  std::size_t best = 0;
  for (std::size_t k = 1; k < values.size(); ++k)
    if (values[k] > values[best]) best = k;
  const double step = kTwoPi / scan_points;
  const double grid_phi0 = best * step;

  // Golden-section maximization on the bracketing interval.
  double lo = grid_phi0 - step, hi = grid_phi0 + step;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = objective(x1), f2 = objective(x2);
  while (hi - lo > 1e-3) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = objective(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = objective(x1);
    }
  }
  const double refined = 0.5 * (lo + hi);
  const double refined_value = objective(refined);
  if (refined_value > values[best] + 1e-12)
    return {wrap_2pi(refined), refined_value};
  return {wrap_2pi(grid_phi0), values[best]};
}

}  // namespace gaitlab
