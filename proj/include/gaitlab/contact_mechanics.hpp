#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "gaitlab/core.hpp"
#include "gaitlab/gait.hpp"
#include "gaitlab/morphology.hpp"

namespace gaitlab {

/// Planar body velocity (xi_x, xi_y, xi_theta) in BL and radians per unit
/// phase.
struct BodyVelocity {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

/// 3x2 local connection evaluated at one shape point: maps (dphi_c, dphi_b)
/// to body velocity, column by column.
struct LocalConnection {
  std::array<std::array<double, 2>, 3> a{};  // [row][col]

  BodyVelocity apply(const ShapeVelocity& v) const {
    return {a[0][0] * v.dphi_c + a[0][1] * v.dphi_b,
            a[1][0] * v.dphi_c + a[1][1] * v.dphi_b,
            a[2][0] * v.dphi_c + a[2][1] * v.dphi_b};
  }
};

struct NoSupportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Geometry of the stance contacts at one shape point, with the shape
/// partial velocities of each contact point (central finite differences of
/// the forward kinematics). All quantities are in the body frame.
struct ContactSnapshot {
  struct Contact {
    Vec2 position;
    double link_heading = 0.0;
    Vec2 dpos_dphi_c;  // BL per radian of contact phase
    Vec2 dpos_dphi_b;
  };
  std::vector<Contact> contacts;
};

namespace detail {

inline std::vector<Vec2> contact_point_positions(const RobotSpec& spec, const GaitParams& g,
                                                 const ShapePoint& p,
                                                 const Configuration& contact_cfg,
                                                 std::vector<double>* headings = nullptr) {
  Configuration cfg = configuration_at(spec, g, p);
  // Contact flags come from the reference configuration so that phase
  // perturbations never change which points are tracked.
  cfg.contact_left = contact_cfg.contact_left;
  cfg.contact_right = contact_cfg.contact_right;
  const PlanarPoseSet poses = forward_kinematics(spec, cfg);

  std::vector<Vec2> pts;
  if (spec.mode == MorphologyMode::legged) {
    for (const FootPoint& f : poses.foot_points) {
      if (!f.in_contact) continue;
      pts.push_back(f.position);
      if (headings) headings->push_back(f.link_heading);
    }
  } else {
    for (int i = 0; i < spec.n_links(); ++i) {
      if (!contact_cfg.contact_left[static_cast<std::size_t>(i)]) continue;
      pts.push_back(poses.link_midpoint(i, spec));
      if (headings) headings->push_back(poses.link_poses[static_cast<std::size_t>(i)].heading);
    }
  }
  return pts;
}

}  // namespace detail

/// Build the stance-contact geometry at shape point `p`. Contact membership
/// is taken at `contact_phase` (defaults to p.phi_c), which lets integrators
/// freeze the contact set over a smooth piece of the cycle.
inline ContactSnapshot build_contact_snapshot(const RobotSpec& spec, const GaitParams& g,
                                              const ShapePoint& p,
                                              std::optional<double> contact_phase = {}) {
  const ShapePoint pc{contact_phase.value_or(p.phi_c), p.phi_b};
  const Configuration contact_cfg = configuration_at(spec, g, pc);

  std::vector<double> headings;
  const std::vector<Vec2> base =
      detail::contact_point_positions(spec, g, p, contact_cfg, &headings);

  const double h = 1e-5;
  const auto cp = detail::contact_point_positions(spec, g, {p.phi_c + h, p.phi_b}, contact_cfg);
  const auto cm = detail::contact_point_positions(spec, g, {p.phi_c - h, p.phi_b}, contact_cfg);
  const auto bp = detail::contact_point_positions(spec, g, {p.phi_c, p.phi_b + h}, contact_cfg);
  const auto bm = detail::contact_point_positions(spec, g, {p.phi_c, p.phi_b - h}, contact_cfg);

  ContactSnapshot snap;
  snap.contacts.reserve(base.size());
  for (std::size_t k = 0; k < base.size(); ++k) {
    snap.contacts.push_back({base[k], headings[k], (cp[k] - cm[k]) / (2.0 * h),
                             (bp[k] - bm[k]) / (2.0 * h)});
  }
  return snap;
}

/// World-frame velocity of one contact point for a given body velocity and
/// shape velocity (body frame instantaneously aligned with the world).
inline Vec2 contact_point_velocity(const ContactSnapshot::Contact& c, const ShapeVelocity& v,
                                   const BodyVelocity& xi) {
  return Vec2{xi.x - xi.theta * c.position.y, xi.y + xi.theta * c.position.x} +
         c.dpos_dphi_c * v.dphi_c + c.dpos_dphi_b * v.dphi_b;
}

/// Regularized Coulomb ground reaction force on a contact sliding with
/// velocity `v`. `normal_load` is the per-contact share of the body weight.
inline Vec2 ground_reaction_force(const FrictionModel& model, const Vec2& v, double link_heading,
                                  double normal_load = 1.0) {
  const double speed = v.norm();
  const double scale = model.mu * normal_load / (speed + model.epsilon_v);
  if (model.kind == FrictionKind::isotropic_coulomb) return -scale * v;
  const Vec2 u{std::cos(link_heading), std::sin(link_heading)};
  const Vec2 t{-u.y, u.x};
  const double v_long = dot(v, u);
  const double v_trans = dot(v, t);
  return -scale * (v_long * u + model.anisotropy_ratio * v_trans * t);
}

/// Net planar force and torque (about the body frame origin) over all stance
/// contacts, with equal normal-load sharing.
inline std::array<double, 3> net_wrench(const FrictionModel& model, const ContactSnapshot& snap,
                                        const ShapeVelocity& v, const BodyVelocity& xi) {
  if (snap.contacts.empty()) throw NoSupportError("net_wrench: no contacts in stance");
  const double load = 1.0 / static_cast<double>(snap.contacts.size());
  std::array<double, 3> w{0.0, 0.0, 0.0};
  for (const auto& c : snap.contacts) {
    const Vec2 vel = contact_point_velocity(c, v, xi);
    const Vec2 f = ground_reaction_force(model, vel, c.link_heading, load);
    w[0] += f.x;
    w[1] += f.y;
    w[2] += cross(c.position, f);
  }
  return w;
}

namespace detail {

inline double wrench_norm(const std::array<double, 3>& w) {
  return std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]);
}

/// Weighted least-squares seed: in the small-slip regime the regularized
/// force law is linear in the contact velocity, so the wrench balance is
/// exactly the normal equation sum_i B_i^T W_i (B_i xi + d_i) = 0 with
/// W_i = u u^T + r t t^T. This lands close to the equilibrium whenever the
/// contacts mostly stick, which is where Newton from zero struggles.
inline std::array<double, 3> balance_seed(const FrictionModel& model,
                                          const ContactSnapshot& snap,
                                          const ShapeVelocity& v) {
  std::vector<std::vector<double>> ata(3, std::vector<double>(3, 0.0));
  std::vector<double> atb(3, 0.0);
  for (const auto& c : snap.contacts) {
    // Rows of B_i: d(contact velocity)/d(xi).
    const double bx[3] = {1.0, 0.0, -c.position.y};
    const double by[3] = {0.0, 1.0, c.position.x};
    const Vec2 d = c.dpos_dphi_c * v.dphi_c + c.dpos_dphi_b * v.dphi_b;
    double w[2][2] = {{1.0, 0.0}, {0.0, 1.0}};
    if (model.kind == FrictionKind::anisotropic_coulomb) {
      const Vec2 u{std::cos(c.link_heading), std::sin(c.link_heading)};
      const Vec2 t{-u.y, u.x};
      const double r = model.anisotropy_ratio;
      w[0][0] = u.x * u.x + r * t.x * t.x;
      w[0][1] = u.x * u.y + r * t.x * t.y;
      w[1][0] = w[0][1];
      w[1][1] = u.y * u.y + r * t.y * t.y;
    }
    for (int i = 0; i < 3; ++i) {
      const double wbx = w[0][0] * bx[i] + w[0][1] * by[i];
      const double wby = w[1][0] * bx[i] + w[1][1] * by[i];
      for (int j = 0; j < 3; ++j)
        ata[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +=
            bx[j] * wbx + by[j] * wby;
      atb[static_cast<std::size_t>(i)] -= d.x * wbx + d.y * wby;
    }
  }
  // Tiny ridge: harmless when the normal equations are well conditioned,
  // and selects the minimum-norm member of the solution family when they
  // are singular (e.g. a single contact, where any body velocity that
  // stills the contact point balances the wrench).
  for (int d = 0; d < 3; ++d)
    ata[static_cast<std::size_t>(d)][static_cast<std::size_t>(d)] += 1e-11;
  std::vector<double> seed;
  if (!solve_linear(ata, atb, seed)) return {0.0, 0.0, 0.0};
  return {seed[0], seed[1], seed[2]};
}

/// Damped Newton on the 3-d wrench residual with a finite-difference
/// Jacobian (Levenberg regularization when a step fails); falls back to
/// Nelder-Mead on |wrench|^2 if Newton stalls.
inline BodyVelocity solve_balance(const FrictionModel& model, const ContactSnapshot& snap,
                                  const ShapeVelocity& v, bool& converged) {
  constexpr double kTol = 1e-10;
  constexpr int kMaxIter = 120;

  auto residual = [&](const std::array<double, 3>& x) {
    return net_wrench(model, snap, v, {x[0], x[1], x[2]});
  };

  // Any equilibrium body velocity is bounded by the shape-induced contact
  // velocities: far outside that ball every contact slides against the
  // rigid motion and the forces saturate, so the wrench cannot vanish.
  // Iterates are confined to the ball to keep Newton off the residual's
  // plateau at infinity.
  double drive = 0.0;
  for (const auto& c : snap.contacts)
    drive = std::max(drive, (c.dpos_dphi_c * v.dphi_c + c.dpos_dphi_b * v.dphi_b).norm());
  const double bound = 20.0 * (1.0 + drive);

  auto newton_from = [&](std::array<double, 3> x, std::array<double, 3>& r_out,
                         double& rn_out) {
    std::array<double, 3> r = residual(x);
    double rn = wrench_norm(r);
    for (int it = 0; it < kMaxIter && rn > kTol; ++it) {
      const double fd = 1e-7;
      std::vector<std::vector<double>> jac(3, std::vector<double>(3));
      for (int c = 0; c < 3; ++c) {
        auto xp = x, xm = x;
        xp[static_cast<std::size_t>(c)] += fd;
        xm[static_cast<std::size_t>(c)] -= fd;
        const auto rp = residual(xp), rm = residual(xm);
        for (int rrow = 0; rrow < 3; ++rrow)
          jac[static_cast<std::size_t>(rrow)][static_cast<std::size_t>(c)] =
              (rp[static_cast<std::size_t>(rrow)] - rm[static_cast<std::size_t>(rrow)]) /
              (2.0 * fd);
      }
      std::vector<double> rhs{-r[0], -r[1], -r[2]};

      bool improved = false;
      // Undamped Newton with backtracking first, then Levenberg damping of
      // the Jacobian with growing regularization if the step is rejected.
      for (double marq : {0.0, 1e-8, 1e-6, 1e-4, 1e-2, 1.0, 1e2}) {
        auto damped = jac;
        for (int d = 0; d < 3; ++d)
          damped[static_cast<std::size_t>(d)][static_cast<std::size_t>(d)] += marq;
        std::vector<double> step;
        if (!solve_linear(damped, rhs, step)) continue;
        double lambda = 1.0;
        for (int bt = 0; bt < 30 && !improved; ++bt) {
          const std::array<double, 3> cand{x[0] + lambda * step[0], x[1] + lambda * step[1],
                                           x[2] + lambda * step[2]};
          lambda *= 0.5;
          if (std::sqrt(cand[0] * cand[0] + cand[1] * cand[1] + cand[2] * cand[2]) > bound)
            continue;
          const auto rc = residual(cand);
          const double rcn = wrench_norm(rc);
          if (rcn < rn * (1.0 - 1e-12)) {
            x = cand;
            r = rc;
            rn = rcn;
            improved = true;
          }
        }
        if (improved) break;
      }
      if (!improved) break;
    }
    r_out = r;
    rn_out = rn;
    return x;
  };

  // Deterministic multi-start: the weighted least-squares seed first, then
  // the origin and fixed perturbations of the seed within the ball.
  const std::array<double, 3> seed = balance_seed(model, snap, v);
  const double spread = 0.25 * (1.0 + drive);
  const std::vector<std::array<double, 3>> starts{
      seed,
      {0.0, 0.0, 0.0},
      {seed[0] + spread, seed[1], seed[2]},
      {seed[0] - spread, seed[1], seed[2]},
      {seed[0], seed[1] + spread, seed[2]},
      {seed[0], seed[1] - spread, seed[2]},
      {seed[0], seed[1], seed[2] + spread},
      {seed[0], seed[1], seed[2] - spread},
      {seed[0] + spread, seed[1] - spread, seed[2] + spread},
      {seed[0] - spread, seed[1] + spread, seed[2] - spread}};

  std::array<double, 3> xi{0.0, 0.0, 0.0};
  std::array<double, 3> r{};
  double rn = std::numeric_limits<double>::infinity();
  for (const auto& start : starts) {
    std::array<double, 3> rc{};
    double rcn = 0.0;
    const std::array<double, 3> cand = newton_from(start, rc, rcn);
    if (rcn < rn) {
      xi = cand;
      r = rc;
      rn = rcn;
    }
    if (rn <= 1e-8) break;
  }

  if (rn > 1e-8) {
    // Nelder-Mead on the squared residual, seeded at the best Newton point
    // with a simplex sized to the remaining residual scale.
    auto f = [&](const std::vector<double>& x) {
      const auto w = residual({x[0], x[1], x[2]});
      return w[0] * w[0] + w[1] * w[1] + w[2] * w[2];
    };
    const double scale = std::max(1e-6, std::min(0.05, rn));
    const std::vector<double> best =
        nelder_mead(f, {xi[0], xi[1], xi[2]}, {scale, scale, scale}, 2000, 1e-24);
    const std::array<double, 3> cand{best[0], best[1], best[2]};
    const auto rc = residual(cand);
    if (wrench_norm(rc) < rn) {
      xi = cand;
      r = rc;
      rn = wrench_norm(rc);
    }
    // One more Newton polish from the Nelder-Mead point.
    if (rn > 1e-8) {
      std::array<double, 3> rp{};
      double rpn = 0.0;
      const std::array<double, 3> polished = newton_from(xi, rp, rpn);
      if (rpn < rn) {
        xi = polished;
        r = rp;
        rn = rpn;
      }
    }
  }

  converged = rn <= 1e-8;
  return {xi[0], xi[1], xi[2]};
}

}  // namespace detail

/// Quasi-static body velocity for a given shape velocity: the xi at which
/// the net ground-reaction wrench vanishes. Exactly positively homogeneous:
/// the solve runs on the normalized shape velocity and is rescaled.
inline BodyVelocity solve_body_velocity(const FrictionModel& model, const ContactSnapshot& snap,
                                        const ShapeVelocity& v) {
  if (snap.contacts.empty()) throw NoSupportError("solve_body_velocity: no contacts");
  const double k = std::hypot(v.dphi_c, v.dphi_b);
  if (k == 0.0) return {};
  const ShapeVelocity unit{v.dphi_c / k, v.dphi_b / k};
  bool converged = false;
  const BodyVelocity xi = detail::solve_balance(model, snap, unit, converged);
  if (!converged) throw SolverError("solve_body_velocity: force balance did not converge");
  return {k * xi.x, k * xi.y, k * xi.theta};
}

inline BodyVelocity solve_body_velocity(const RobotSpec& spec, const GaitParams& g,
                                        const ShapePoint& p, const ShapeVelocity& v,
                                        std::optional<double> contact_phase = {}) {
  const ContactSnapshot snap = build_contact_snapshot(spec, g, p, contact_phase);
  if (snap.contacts.empty())
    throw NoSupportError("solve_body_velocity: no contacts at phi_c=" + std::to_string(p.phi_c));
  try {
    return solve_body_velocity(spec.friction, snap, v);
  } catch (const SolverError&) {
    throw SolverError("solve_body_velocity: non-convergence at phi_c=" +
                      std::to_string(p.phi_c) + ", phi_b=" + std::to_string(p.phi_b));
  }
}

/// Columnwise local connection at a shape point: each column is the solve
/// along a unit basis shape velocity. Coulomb response is homogeneous but
/// not additive, so A*(v) is a linearization; use the directionally exact
/// solve_body_velocity for composite rates.
inline LocalConnection local_connection_at(const RobotSpec& spec, const GaitParams& g,
                                           const ShapePoint& p,
                                           std::optional<double> contact_phase = {}) {
  const ContactSnapshot snap = build_contact_snapshot(spec, g, p, contact_phase);
  if (snap.contacts.empty())
    throw NoSupportError("local_connection_at: no contacts at phi_c=" + std::to_string(p.phi_c));
  LocalConnection a;
  const BodyVelocity col_c = solve_body_velocity(spec.friction, snap, {1.0, 0.0});
  const BodyVelocity col_b = solve_body_velocity(spec.friction, snap, {0.0, 1.0});
  a.a[0][0] = col_c.x;
  a.a[1][0] = col_c.y;
  a.a[2][0] = col_c.theta;
  a.a[0][1] = col_b.x;
  a.a[1][1] = col_b.y;
  a.a[2][1] = col_b.theta;
  return a;
}

}  // namespace gaitlab
