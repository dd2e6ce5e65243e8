#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gaitlab/gait.hpp"
#include "gaitlab/morphology.hpp"
#include "gaitlab/stability.hpp"

using namespace gaitlab;

namespace {

/// Independent point-in-triangle oracle via barycentric signs.
bool in_triangle(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c) {
  const double d1 = cross(b - a, p - a);
  const double d2 = cross(c - b, p - b);
  const double d3 = cross(a - c, p - c);
  const bool has_neg = d1 < 0 || d2 < 0 || d3 < 0;
  const bool has_pos = d1 > 0 || d2 > 0 || d3 > 0;
  return !(has_neg && has_pos);
}

}  // namespace

TEST_CASE("hexapod alternating tripod mid-stance is statically stable") {
  const RobotSpec spec = make_reference_robot("hexapod");
  const GaitParams g = GaitParams::for_robot(spec, 0.5, 0.5, UndulationMode::fixed_straight);
  const Configuration cfg = configuration_at(spec, g, {kPi / 2.0, 0.0});
  const PlanarPoseSet poses = forward_kinematics(spec, cfg);

  std::vector<Vec2> stance;
  for (const FootPoint& f : poses.foot_points)
    if (f.in_contact) stance.push_back(f.position);
  REQUIRE(stance.size() == 3);
  // Independent oracle: CoM (the body-frame origin) inside the triangle.
  CHECK(in_triangle(poses.com, stance[0], stance[1], stance[2]));
  CHECK(classify(spec, poses) == StabilityClass::statically_stable);
}

TEST_CASE("quadruped pace has whole-side swing phases") {
  const RobotSpec spec = make_reference_robot("quadruped");
  const GaitParams g = GaitParams::for_robot(spec, 0.5, 0.0, UndulationMode::fixed_straight);
  // Phi_lat = 0 puts both left legs in phase; in their shared swing window
  // the entire left side is lifted.
  const double phi = kPi + 0.3;  // inside the left-side swing half-cycle
  const Configuration cfg = configuration_at(spec, g, {phi, 0.0});
  CHECK(cfg.contact_left[0] == 0);
  CHECK(cfg.contact_left[1] == 0);
  CHECK(classify(spec, forward_kinematics(spec, cfg)) == StabilityClass::unstable);
}

TEST_CASE("full stance of a straight symmetric robot is statically stable") {
  const RobotSpec spec = make_reference_robot("myriapod");
  const GaitParams g = GaitParams::for_robot(spec, 1.0, 0.25, UndulationMode::fixed_straight);
  const Configuration cfg = configuration_at(spec, g, {0.7, 0.0});
  CHECK(classify(spec, forward_kinematics(spec, cfg)) == StabilityClass::statically_stable);
}

TEST_CASE("stability metric fixtures") {
  const RobotSpec hex = make_reference_robot("hexapod");
  CHECK(stability_metric(hex, GaitParams::for_robot(hex, 0.5, 0.5)) == doctest::Approx(1.0));

  const RobotSpec quad = make_reference_robot("quadruped");
  CHECK(stability_metric(quad, GaitParams::for_robot(quad, 0.5, 0.0)) == 0.0);

  CHECK(stability_metric(quad, GaitParams::for_robot(quad, 1.0, 0.25)) == doctest::Approx(1.0));
  CHECK_THROWS_AS(stability_metric(hex, GaitParams::for_robot(hex, 0.5, 0.5), 100),
                  std::invalid_argument);
}

TEST_CASE("metric is non-decreasing in duty factor") {
  const RobotSpec hex = make_reference_robot("hexapod");
  for (double phi_lat : {0.25, 0.5, 0.75}) {
    double prev = -1.0;
    for (double d : {0.5, 0.6, 0.7, 0.8, 0.9, 1.0}) {
      const double m = stability_metric(hex, GaitParams::for_robot(hex, d, phi_lat), 720);
      CHECK(m >= prev - 1e-12);
      prev = m;
    }
  }
}

TEST_CASE("more legs are at least as stable at shared gait parameters") {
  const RobotSpec quad = make_reference_robot("quadruped");
  const RobotSpec hex = make_reference_robot("hexapod");
  const RobotSpec myr = make_reference_robot("myriapod");
  for (double d : {0.55, 0.7, 0.85}) {
    for (double phi_lat : {0.25, 0.5, 0.75}) {
      const double mq = stability_metric(quad, GaitParams::for_robot(quad, d, phi_lat), 720);
      const double mh = stability_metric(hex, GaitParams::for_robot(hex, d, phi_lat), 720);
      const double mm = stability_metric(myr, GaitParams::for_robot(myr, d, phi_lat), 720);
      CHECK(mm >= mh - 1e-12);
      CHECK(mh >= mq - 1e-12);
    }
  }
}

TEST_CASE("hexapod stability peaks at the tripod phase lag") {
  const RobotSpec hex = make_reference_robot("hexapod");
  const double d = 0.55;
  double prev = 2.0;
  // Walk outward from Phi_lat = 0.5; the metric must not increase.
  for (double offset : {0.0, 0.1, 0.2, 0.3, 0.4}) {
    const double lo = stability_metric(hex, GaitParams::for_robot(hex, d, 0.5 - offset), 720);
    const double hi = stability_metric(hex, GaitParams::for_robot(hex, d, 0.5 + offset), 720);
    const double m = std::max(lo, hi);
    CHECK(m <= prev + 1e-12);
    prev = m;
  }
}

TEST_CASE("classification is invariant to rigid motions") {
  const RobotSpec hex = make_reference_robot("hexapod");
  const GaitParams g = GaitParams::for_robot(hex, 0.7, 0.4, UndulationMode::fixed_straight);
  for (double phi : {0.3, 1.4, 2.9, 4.4, 5.8}) {
    const Configuration cfg = configuration_at(hex, g, {phi, 0.0});
    const PlanarPoseSet poses = forward_kinematics(hex, cfg);
    const StabilityClass base = classify(hex, poses);
    for (const Pose2& motion : {Pose2{1.0, -2.0, 0.8}, Pose2{-0.4, 0.1, -2.5}}) {
      PlanarPoseSet moved = transform(poses, motion);
      moved.com = motion.apply(poses.com);
      CHECK(classify(hex, moved) == base);
    }
  }
}

TEST_CASE("sidewinder stability counts contact support") {
  const RobotSpec side = make_reference_robot("sidewinder");
  // Full contact at D = 1: the CoM sits on the contact hull of a bent body.
  const GaitParams full = GaitParams::for_robot(side, 1.0, 2.0 / 7.0, UndulationMode::coordinated);
  const double m = stability_metric(side, full, 720);
  CHECK(m >= 0.0);
  CHECK(m <= 1.0);

  // A duty factor low enough that some phases have zero contacts zeroes the
  // metric through the unstable rule.
  const GaitParams sparse = GaitParams::for_robot(side, 0.1, 0.0, UndulationMode::coordinated);
  CHECK(stability_metric(side, sparse, 720) == 0.0);
}
