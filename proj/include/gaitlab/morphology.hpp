#pragma once

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "gaitlab/core.hpp"

namespace gaitlab {

enum class MorphologyMode { legged, sidewinder };

enum class FrictionKind { isotropic_coulomb, anisotropic_coulomb };

/// Regularized Coulomb ground reaction model. mu scales the per-contact
/// tangential force; anisotropy_ratio is transverse/longitudinal drag.
struct FrictionModel {
  FrictionKind kind = FrictionKind::isotropic_coulomb;
  double mu = 1.0;
  double anisotropy_ratio = 2.0;
  double epsilon_v = 1e-3;

  void validate() const {
    if (mu <= 0.0) throw std::invalid_argument("FrictionModel: mu must be > 0");
    if (epsilon_v <= 0.0) throw std::invalid_argument("FrictionModel: epsilon_v must be > 0");
    if (kind == FrictionKind::anisotropic_coulomb && anisotropy_ratio <= 0.0)
      throw std::invalid_argument("FrictionModel: anisotropy_ratio must be > 0");
  }
};

/// Morphology of a serially connected locomotor. Lengths are in body-length
/// units (the backbone is normalized to total length 1). Leg pair i attaches
/// to link i.
struct RobotSpec {
  std::string name;
  int n_leg_pairs = 0;
  int n_body_joints = 0;
  std::vector<double> link_lengths;
  std::vector<double> leg_lengths;        // one per pair
  std::vector<double> leg_attach_offsets; // distance from the link front, BL
  std::vector<double> link_masses;
  std::vector<double> leg_masses;         // one per pair; applied per foot
  FrictionModel friction;
  double amplitude_theta = 0.0;  // radians
  double amplitude_alpha = 0.0;  // radians
  MorphologyMode mode = MorphologyMode::legged;

  int n_links() const { return static_cast<int>(link_lengths.size()); }

  /// Rescale link lengths so the backbone sums to exactly 1.
  void normalize() {
    const double total = std::accumulate(link_lengths.begin(), link_lengths.end(), 0.0);
    if (total <= 0.0) throw std::invalid_argument("RobotSpec: non-positive backbone length");
    for (double& l : link_lengths) l /= total;
  }

  void validate() const {
    if (n_leg_pairs < 0) throw std::invalid_argument("RobotSpec: n_leg_pairs must be >= 0");
    if (n_body_joints < 0) throw std::invalid_argument("RobotSpec: n_body_joints must be >= 0");
    if (n_links() != n_body_joints + 1)
      throw std::invalid_argument("RobotSpec: link count must equal n_body_joints + 1");
    const double total = std::accumulate(link_lengths.begin(), link_lengths.end(), 0.0);
    if (std::fabs(total - 1.0) > 1e-12)
      throw std::invalid_argument("RobotSpec: link lengths must sum to 1 (call normalize())");
    for (double l : link_lengths)
      if (l <= 0.0) throw std::invalid_argument("RobotSpec: link lengths must be positive");
    if (n_leg_pairs == 0 && mode != MorphologyMode::sidewinder)
      throw std::invalid_argument("RobotSpec: legless spec must use sidewinder mode");
    if (mode == MorphologyMode::legged) {
      if (n_leg_pairs > n_links())
        throw std::invalid_argument("RobotSpec: more leg pairs than links");
      if (static_cast<int>(leg_lengths.size()) != n_leg_pairs)
        throw std::invalid_argument("RobotSpec: leg_lengths size mismatch");
      if (static_cast<int>(leg_attach_offsets.size()) != n_leg_pairs)
        throw std::invalid_argument("RobotSpec: leg_attach_offsets size mismatch");
      for (int i = 0; i < n_leg_pairs; ++i) {
        if (leg_lengths[i] <= 0.0)
          throw std::invalid_argument("RobotSpec: leg lengths must be positive");
        if (leg_attach_offsets[i] < 0.0 || leg_attach_offsets[i] > link_lengths[i])
          throw std::invalid_argument("RobotSpec: leg attach offset outside its link");
      }
    }
    if (static_cast<int>(link_masses.size()) != n_links())
      throw std::invalid_argument("RobotSpec: link_masses size mismatch");
    if (!leg_masses.empty() && static_cast<int>(leg_masses.size()) != n_leg_pairs)
      throw std::invalid_argument("RobotSpec: leg_masses size mismatch");
    double mass = std::accumulate(link_masses.begin(), link_masses.end(), 0.0);
    mass += 2.0 * std::accumulate(leg_masses.begin(), leg_masses.end(), 0.0);
    if (mass <= 0.0) throw std::invalid_argument("RobotSpec: total mass must be > 0");
    friction.validate();
  }
};

/// Joint angles and binary contact states for one instant.
struct Configuration {
  std::vector<double> body_joint_angles;
  std::vector<double> shoulder_angles_left;
  std::vector<double> shoulder_angles_right;
  std::vector<int> contact_left;   // 0/1; for sidewinders, per link
  std::vector<int> contact_right;  // empty for sidewinders

  void validate_against(const RobotSpec& spec) const {
    if (static_cast<int>(body_joint_angles.size()) != spec.n_body_joints)
      throw std::invalid_argument("Configuration: body joint count mismatch");
    if (spec.mode == MorphologyMode::legged) {
      const auto n = static_cast<std::size_t>(spec.n_leg_pairs);
      if (shoulder_angles_left.size() != n || shoulder_angles_right.size() != n ||
          contact_left.size() != n || contact_right.size() != n)
        throw std::invalid_argument("Configuration: leg array size mismatch");
    } else {
      if (static_cast<int>(contact_left.size()) != spec.n_links())
        throw std::invalid_argument("Configuration: sidewinder contact size mismatch");
      if (!contact_right.empty())
        throw std::invalid_argument("Configuration: sidewinder has no right contacts");
    }
    for (int c : contact_left)
      if (c != 0 && c != 1) throw std::invalid_argument("Configuration: contacts must be 0/1");
    for (int c : contact_right)
      if (c != 0 && c != 1) throw std::invalid_argument("Configuration: contacts must be 0/1");
  }
};

enum class Side { left, right };

struct FootPoint {
  Vec2 position;
  Side side = Side::left;
  int pair_index = 0;   // 0-based
  bool in_contact = false;
  double link_heading = 0.0;  // heading of the parent link
};

/// Planar chain geometry in the body frame. Link poses are anchored at the
/// front (head-side) point of each link; links extend backward along
/// -heading.
struct PlanarPoseSet {
  std::vector<Pose2> link_poses;
  std::vector<FootPoint> foot_points;
  Vec2 com;

  Vec2 link_front(int i) const { return link_poses[static_cast<std::size_t>(i)].position(); }
  Vec2 link_back(int i, const RobotSpec& spec) const {
    const Pose2& p = link_poses[static_cast<std::size_t>(i)];
    const double l = spec.link_lengths[static_cast<std::size_t>(i)];
    return {p.x - l * std::cos(p.heading), p.y - l * std::sin(p.heading)};
  }
  Vec2 link_midpoint(int i, const RobotSpec& spec) const {
    const Pose2& p = link_poses[static_cast<std::size_t>(i)];
    const double l = spec.link_lengths[static_cast<std::size_t>(i)];
    return {p.x - 0.5 * l * std::cos(p.heading), p.y - 0.5 * l * std::sin(p.heading)};
  }
};

/// Apply a rigid motion to every point and heading of a pose set.
inline PlanarPoseSet transform(const PlanarPoseSet& poses, const Pose2& motion) {
  PlanarPoseSet out = poses;
  for (Pose2& p : out.link_poses) {
    const Vec2 q = motion.apply(p.position());
    p = {q.x, q.y, p.heading + motion.heading};
  }
  for (FootPoint& f : out.foot_points) {
    f.position = motion.apply(f.position);
    f.link_heading += motion.heading;
  }
  out.com = motion.apply(out.com);
  return out;
}

/// Mass-weighted mean of link midpoints (and feet, when leg masses > 0),
/// evaluated in whatever frame the pose set is expressed in.
inline Vec2 center_of_mass(const PlanarPoseSet& poses, const RobotSpec& spec) {
  double mass = 0.0;
  Vec2 weighted{0.0, 0.0};
  for (int i = 0; i < spec.n_links(); ++i) {
    const double m = spec.link_masses[static_cast<std::size_t>(i)];
    weighted += m * poses.link_midpoint(i, spec);
    mass += m;
  }
  if (!spec.leg_masses.empty()) {
    for (const FootPoint& f : poses.foot_points) {
      const double m = spec.leg_masses[static_cast<std::size_t>(f.pair_index)];
      weighted += m * f.position;
      mass += m;
    }
  }
  if (mass <= 0.0) throw std::invalid_argument("center_of_mass: total mass must be > 0");
  return weighted / mass;
}

namespace detail {

inline double mean_link_heading(const PlanarPoseSet& poses, const RobotSpec& spec) {
  double m = 0.0, h = 0.0;
  for (int i = 0; i < spec.n_links(); ++i) {
    const double w = spec.link_masses[static_cast<std::size_t>(i)];
    h += w * poses.link_poses[static_cast<std::size_t>(i)].heading;
    m += w;
  }
  return h / m;
}

}  // namespace detail

/// Planar forward kinematics in the canonical body frame: origin at the mass
/// center, heading zero at the mass-weighted mean link heading. Link 0 is the
/// head link; body joint i turns link i+1 by -alpha_i relative to link i
/// (positive bend swings the posterior body toward the robot's left, which
/// makes a positive bend wave assist a head-first gait wave).
inline PlanarPoseSet forward_kinematics(const RobotSpec& spec, const Configuration& cfg) {
  cfg.validate_against(spec);

  PlanarPoseSet raw;
  raw.link_poses.reserve(static_cast<std::size_t>(spec.n_links()));
  Vec2 front{0.0, 0.0};
  double heading = 0.0;
  for (int i = 0; i < spec.n_links(); ++i) {
    if (i > 0) heading -= cfg.body_joint_angles[static_cast<std::size_t>(i - 1)];
    raw.link_poses.push_back({front.x, front.y, heading});
    const double l = spec.link_lengths[static_cast<std::size_t>(i)];
    front = {front.x - l * std::cos(heading), front.y - l * std::sin(heading)};
  }

  if (spec.mode == MorphologyMode::legged) {
    raw.foot_points.reserve(static_cast<std::size_t>(2 * spec.n_leg_pairs));
    for (int i = 0; i < spec.n_leg_pairs; ++i) {
      const Pose2& link = raw.link_poses[static_cast<std::size_t>(i)];
      const double off = spec.leg_attach_offsets[static_cast<std::size_t>(i)];
      const Vec2 attach{link.x - off * std::cos(link.heading),
                        link.y - off * std::sin(link.heading)};
      const double len = spec.leg_lengths[static_cast<std::size_t>(i)];
      const double th_l = cfg.shoulder_angles_left[static_cast<std::size_t>(i)];
      const double th_r = cfg.shoulder_angles_right[static_cast<std::size_t>(i)];
      const double a_l = link.heading + kPi / 2.0 - th_l;
      const double a_r = link.heading - kPi / 2.0 + th_r;
      raw.foot_points.push_back({attach + len * Vec2{std::cos(a_l), std::sin(a_l)}, Side::left, i,
                                 cfg.contact_left[static_cast<std::size_t>(i)] != 0,
                                 link.heading});
      raw.foot_points.push_back({attach + len * Vec2{std::cos(a_r), std::sin(a_r)}, Side::right, i,
                                 cfg.contact_right[static_cast<std::size_t>(i)] != 0,
                                 link.heading});
    }
  }

  raw.com = center_of_mass(raw, spec);
  const double mean_h = detail::mean_link_heading(raw, spec);

  // Re-express in the canonical body frame.
  PlanarPoseSet out = raw;
  const double c = std::cos(-mean_h), s = std::sin(-mean_h);
  auto to_body = [&](const Vec2& p) -> Vec2 {
    const Vec2 d = p - raw.com;
    return {c * d.x - s * d.y, s * d.x + c * d.y};
  };
  for (std::size_t i = 0; i < out.link_poses.size(); ++i) {
    const Vec2 q = to_body(raw.link_poses[i].position());
    out.link_poses[i] = {q.x, q.y, raw.link_poses[i].heading - mean_h};
  }
  for (std::size_t i = 0; i < out.foot_points.size(); ++i) {
    out.foot_points[i].position = to_body(raw.foot_points[i].position);
    out.foot_points[i].link_heading = raw.foot_points[i].link_heading - mean_h;
  }
  out.com = {0.0, 0.0};
  return out;
}

/// Reference morphologies used throughout: quadruped, hexapod, myriapod (8
/// leg pairs), and a legless 7-segment sidewinder.
inline RobotSpec make_reference_robot(const std::string& name) {
  RobotSpec spec;
  spec.name = name;
  auto uniform = [](int n, double v) { return std::vector<double>(static_cast<std::size_t>(n), v); };
  if (name == "quadruped") {
    spec.n_leg_pairs = 2;
    spec.n_body_joints = 1;
    spec.link_lengths = uniform(2, 0.5);
    spec.leg_lengths = uniform(2, 0.25);
    spec.leg_attach_offsets = uniform(2, 0.25);
    spec.amplitude_theta = deg2rad(30.0);
    spec.amplitude_alpha = deg2rad(30.0);
    spec.friction.kind = FrictionKind::anisotropic_coulomb;
  } else if (name == "hexapod") {
    spec.n_leg_pairs = 3;
    spec.n_body_joints = 2;
    spec.link_lengths = uniform(3, 1.0 / 3.0);
    spec.leg_lengths = uniform(3, 0.2);
    spec.leg_attach_offsets = uniform(3, 1.0 / 6.0);
    spec.amplitude_theta = deg2rad(10.0);
    spec.amplitude_alpha = deg2rad(10.0);
    spec.friction.kind = FrictionKind::anisotropic_coulomb;
  } else if (name == "myriapod") {
    spec.n_leg_pairs = 8;
    spec.n_body_joints = 7;
    spec.link_lengths = uniform(8, 0.125);
    spec.leg_lengths = uniform(8, 1.0 / 6.0);
    spec.leg_attach_offsets = uniform(8, 0.0625);
    spec.amplitude_theta = deg2rad(12.0);
    spec.amplitude_alpha = deg2rad(17.0);
    spec.friction.kind = FrictionKind::anisotropic_coulomb;
  } else if (name == "sidewinder") {
    spec.n_leg_pairs = 0;
    spec.n_body_joints = 6;
    spec.link_lengths = uniform(7, 1.0 / 7.0);
    spec.amplitude_theta = 0.0;
    spec.amplitude_alpha = 5.6 / 7.0;  // per-joint bend of the lateral wave
    spec.friction.kind = FrictionKind::isotropic_coulomb;
    spec.mode = MorphologyMode::sidewinder;
  } else {
    throw std::invalid_argument("make_reference_robot: unknown robot '" + name + "'");
  }
  spec.link_masses = uniform(spec.n_links(), 1.0 / spec.n_links());
  spec.normalize();
  spec.validate();
  return spec;
}

}  // namespace gaitlab
