#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "gaitlab/core.hpp"
#include "gaitlab/gait.hpp"
#include "gaitlab/morphology.hpp"

namespace gaitlab {

enum class StabilityClass { statically_stable, statically_unstable, unstable };

namespace detail {

/// Convex hull by monotone chain; collinear points are dropped, so a
/// degenerate support reduces to fewer than 3 vertices.
inline std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Vec2& a, const Vec2& b) { return a.x == b.x && a.y == b.y; }),
            pts.end());
  const std::size_t n = pts.size();
  if (n < 3) return pts;
  std::vector<Vec2> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 1e-15) --k;
    hull[k++] = pts[i];
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = n - 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 1e-15) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

/// Point-in-convex-polygon, boundary inclusive.
inline bool inside_hull(const std::vector<Vec2>& hull, const Vec2& p) {
  if (hull.size() < 3) return false;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Vec2& a = hull[i];
    const Vec2& b = hull[(i + 1) % hull.size()];
    if (cross(b - a, p - a) < -1e-12) return false;
  }
  return true;
}

}  // namespace detail

/// Classify one configuration. Legged systems are unstable when an entire
/// side is in swing, statically stable when the CoM lies in the support
/// polygon of at least 3 non-collinear stance feet, statically unstable
/// otherwise. Sidewinders are unstable only with zero contacts.
inline StabilityClass classify(const RobotSpec& spec, const PlanarPoseSet& poses) {
  std::vector<Vec2> support;
  if (spec.mode == MorphologyMode::legged) {
    int left_stance = 0, right_stance = 0;
    for (const FootPoint& f : poses.foot_points) {
      if (!f.in_contact) continue;
      support.push_back(f.position);
      (f.side == Side::left ? left_stance : right_stance)++;
    }
    if (left_stance == 0 || right_stance == 0) return StabilityClass::unstable;
  } else {
    for (const FootPoint& f : poses.foot_points)
      if (f.in_contact) support.push_back(f.position);
    if (support.empty()) return StabilityClass::unstable;
  }
  const std::vector<Vec2> hull = detail::convex_hull(support);
  return detail::inside_hull(hull, poses.com) ? StabilityClass::statically_stable
                                              : StabilityClass::statically_unstable;
}

namespace detail {

/// Pose set with sidewinder contact points exposed as foot points so the
/// classifier sees one support-geometry shape.
inline PlanarPoseSet poses_with_sidewinder_contacts(const RobotSpec& spec,
                                                    const Configuration& cfg) {
  PlanarPoseSet poses = forward_kinematics(spec, cfg);
  for (int i = 0; i < spec.n_links(); ++i) {
    if (!cfg.contact_left[static_cast<std::size_t>(i)]) continue;
    poses.foot_points.push_back({poses.link_midpoint(i, spec), Side::left, i, true,
                                 poses.link_poses[static_cast<std::size_t>(i)].heading});
  }
  return poses;
}

}  // namespace detail

/// Fraction of the cycle spent statically stable, or 0 if any sampled phase
/// is unstable. Legged systems are evaluated with a straight backbone;
/// sidewinders with their coordinated undulation. Samples are offset half a
/// step from the contact switches.
inline double stability_metric(const RobotSpec& spec, const GaitParams& g, int samples = 720) {
  g.validate();
  if (samples < 360) throw std::invalid_argument("stability_metric: samples must be >= 360");
  int stable = 0;
  for (int k = 0; k < samples; ++k) {
    const double phi_c = (k + 0.5) * kTwoPi / samples;
    StabilityClass cls;
    if (spec.mode == MorphologyMode::legged) {
      GaitParams straight = g;
      straight.undulation = UndulationMode::fixed_straight;
      const Configuration cfg = configuration_at(spec, straight, {phi_c, 0.0});
      cls = classify(spec, forward_kinematics(spec, cfg));
    } else {
      const Configuration cfg = configuration_at(spec, g, {phi_c, phi_c + g.phi_0});
      cls = classify(spec, detail::poses_with_sidewinder_contacts(spec, cfg));
    }
    if (cls == StabilityClass::unstable) return 0.0;
    if (cls == StabilityClass::statically_stable) ++stable;
  }
  return static_cast<double>(stable) / samples;
}

}  // namespace gaitlab
