#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gaitlab/contact_mechanics.hpp"
#include "gaitlab/morphology.hpp"

using namespace gaitlab;

namespace {

const RobotSpec kHexapod = make_reference_robot("hexapod");

GaitParams hexapod_gait(double d = 0.6, double phi_lat = 0.3) {
  return GaitParams::for_robot(kHexapod, d, phi_lat, UndulationMode::coordinated);
}

/// A shape point comfortably away from the contact switches of the gait.
ShapePoint interior_point(const RobotSpec& spec, const GaitParams& g) {
  const std::vector<double> events = contact_switch_phases(spec, g);
  double best = 0.0, best_dist = -1.0;
  for (int k = 0; k < 256; ++k) {
    const double phi = (k + 0.5) * kTwoPi / 256.0;
    double dist = kTwoPi;
    for (double e : events) dist = std::min(dist, std::fabs(wrap_pi(phi - e)));
    if (dist > best_dist) {
      best_dist = dist;
      best = phi;
    }
  }
  return {best, best + 0.9};
}

/// Mirror a snapshot across the x axis (y -> -y on every geometric field).
ContactSnapshot mirror(const ContactSnapshot& snap) {
  ContactSnapshot out = snap;
  for (auto& c : out.contacts) {
    c.position.y = -c.position.y;
    c.link_heading = -c.link_heading;
    c.dpos_dphi_c.y = -c.dpos_dphi_c.y;
    c.dpos_dphi_b.y = -c.dpos_dphi_b.y;
  }
  return out;
}

/// Rotate a snapshot rigidly by beta about the body origin.
ContactSnapshot rotated(const ContactSnapshot& snap, double beta) {
  ContactSnapshot out = snap;
  for (auto& c : out.contacts) {
    c.position = rotate(c.position, beta);
    c.link_heading += beta;
    c.dpos_dphi_c = rotate(c.dpos_dphi_c, beta);
    c.dpos_dphi_b = rotate(c.dpos_dphi_b, beta);
  }
  return out;
}

}  // namespace

TEST_CASE("contact point velocity: rigid-body and shape contributions") {
  const GaitParams g = hexapod_gait();
  const ShapePoint p = interior_point(kHexapod, g);
  const ContactSnapshot snap = build_contact_snapshot(kHexapod, g, p);
  REQUIRE(!snap.contacts.empty());

  for (const auto& c : snap.contacts) {
    // Zero rates give zero velocity.
    CHECK(contact_point_velocity(c, {0.0, 0.0}, {0.0, 0.0, 0.0}).norm() == 0.0);
    // Pure translation moves every stance foot identically.
    const Vec2 v = contact_point_velocity(c, {0.0, 0.0}, {1.0, 0.0, 0.0});
    CHECK(v.x == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(v.y == 0.0);
    // Pure rotation: analytic rigid-body formula omega x r.
    const double omega = 0.8;
    const Vec2 w = contact_point_velocity(c, {0.0, 0.0}, {0.0, 0.0, omega});
    CHECK(w.x == doctest::Approx(-omega * c.position.y).epsilon(1e-12));
    CHECK(w.y == doctest::Approx(omega * c.position.x).epsilon(1e-12));
  }
}

TEST_CASE("ground reaction force closed forms") {
  FrictionModel iso;
  iso.kind = FrictionKind::isotropic_coulomb;
  iso.mu = 1.3;
  iso.epsilon_v = 1e-3;

  CHECK(ground_reaction_force(iso, {0.0, 0.0}, 0.4).norm() == 0.0);

  const Vec2 v{0.07, -0.02};
  const Vec2 f = ground_reaction_force(iso, v, 0.4, 0.5);
  const Vec2 fneg = ground_reaction_force(iso, {-v.x, -v.y}, 0.4, 0.5);
  CHECK((f + fneg).norm() < 1e-15);

  // |v| = 100 eps: closed-form magnitude mu * load * 100 / 101.
  const Vec2 u{100.0 * iso.epsilon_v, 0.0};
  const double load = 0.25;
  const Vec2 fu = ground_reaction_force(iso, u, 1.1, load);
  CHECK(fu.norm() == doctest::Approx(iso.mu * load * 100.0 / 101.0).epsilon(1e-12));

  // Anisotropic: transverse drag scaled by the ratio.
  FrictionModel ani = iso;
  ani.kind = FrictionKind::anisotropic_coulomb;
  ani.anisotropy_ratio = 2.0;
  const double heading = 0.6;
  const Vec2 along{std::cos(heading), std::sin(heading)};
  const Vec2 across{-std::sin(heading), std::cos(heading)};
  const double speed = 0.05;
  const Vec2 f_long = ground_reaction_force(ani, speed * along, heading, 1.0);
  const Vec2 f_trans = ground_reaction_force(ani, speed * across, heading, 1.0);
  CHECK(f_trans.norm() == doctest::Approx(2.0 * f_long.norm()).epsilon(1e-12));
}

TEST_CASE("net wrench oracles") {
  // Single contact: the wrench is exactly that one force and its moment.
  ContactSnapshot one;
  one.contacts.push_back({{0.3, -0.2}, 0.25, {0.01, 0.04}, {0.0, 0.0}});
  FrictionModel iso;
  iso.kind = FrictionKind::isotropic_coulomb;
  const ShapeVelocity v{1.0, 0.0};
  const BodyVelocity xi{0.02, -0.01, 0.1};
  const Vec2 vel = contact_point_velocity(one.contacts[0], v, xi);
  const Vec2 f = ground_reaction_force(iso, vel, 0.25, 1.0);
  const auto w = net_wrench(iso, one, v, xi);
  CHECK(w[0] == doctest::Approx(f.x).epsilon(1e-15));
  CHECK(w[1] == doctest::Approx(f.y).epsilon(1e-15));
  CHECK(w[2] == doctest::Approx(cross(one.contacts[0].position, f)).epsilon(1e-15));

  // Doubling mu doubles the wrench exactly.
  FrictionModel twice = iso;
  twice.mu = 2.0 * iso.mu;
  const auto w2 = net_wrench(twice, one, v, xi);
  for (int k = 0; k < 3; ++k) CHECK(w2[k] == doctest::Approx(2.0 * w[k]).epsilon(1e-15));

  // Bilateral symmetry: mirrored contact pair under pure x translation.
  ContactSnapshot sym;
  sym.contacts.push_back({{0.1, 0.3}, 0.0, {0.0, 0.0}, {0.0, 0.0}});
  sym.contacts.push_back({{0.1, -0.3}, 0.0, {0.0, 0.0}, {0.0, 0.0}});
  const auto ws = net_wrench(iso, sym, {0.0, 0.0}, {0.5, 0.0, 0.0});
  CHECK(std::fabs(ws[1]) < 1e-15);
  CHECK(std::fabs(ws[2]) < 1e-15);

  ContactSnapshot empty;
  CHECK_THROWS_AS(net_wrench(iso, empty, v, xi), NoSupportError);
}

TEST_CASE("force balance: trivial zero, equilibrium certificate, determinism") {
  const GaitParams g = hexapod_gait();
  const ShapePoint p = interior_point(kHexapod, g);
  const ContactSnapshot snap = build_contact_snapshot(kHexapod, g, p);

  const BodyVelocity zero = solve_body_velocity(kHexapod.friction, snap, {0.0, 0.0});
  CHECK(zero.x == 0.0);
  CHECK(zero.y == 0.0);
  CHECK(zero.theta == 0.0);

  // The solver normalizes the shape rates, balances at unit norm, and
  // rescales, so the equilibrium certificate holds at the normalized rates.
  const BodyVelocity xi = solve_body_velocity(kHexapod.friction, snap, {1.0, 1.0});
  const double s = std::sqrt(2.0);
  const auto w = net_wrench(kHexapod.friction, snap, {1.0 / s, 1.0 / s},
                            {xi.x / s, xi.y / s, xi.theta / s});
  CHECK(std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]) < 1e-8);

  const BodyVelocity again = solve_body_velocity(kHexapod.friction, snap, {1.0, 1.0});
  CHECK(xi.x == again.x);
  CHECK(xi.y == again.y);
  CHECK(xi.theta == again.theta);
}

TEST_CASE("rate independence across k in {0.5, 1, 2, 10}") {
  const GaitParams g = hexapod_gait();
  const ShapePoint p = interior_point(kHexapod, g);
  const ContactSnapshot snap = build_contact_snapshot(kHexapod, g, p);
  const BodyVelocity base = solve_body_velocity(kHexapod.friction, snap, {1.0, 1.0});
  for (double k : {0.5, 2.0, 10.0}) {
    const BodyVelocity xi = solve_body_velocity(kHexapod.friction, snap, {k, k});
    CHECK(xi.x == doctest::Approx(k * base.x).epsilon(1e-6));
    CHECK(xi.y == doctest::Approx(k * base.y).epsilon(1e-6));
    CHECK(xi.theta == doctest::Approx(k * base.theta).epsilon(1e-6));
  }
}

TEST_CASE("mirror equivariance across random shape points") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  const GaitParams g = hexapod_gait(0.55, 0.35);
  int tested = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const ShapePoint p{u(rng), u(rng)};
    ContactSnapshot snap;
    try {
      snap = build_contact_snapshot(kHexapod, g, p);
    } catch (const std::exception&) {
      continue;
    }
    if (snap.contacts.empty()) continue;
    BodyVelocity a, b;
    try {
      a = solve_body_velocity(kHexapod.friction, snap, {1.0, 1.0});
      b = solve_body_velocity(kHexapod.friction, mirror(snap), {1.0, 1.0});
    } catch (const SolverError&) {
      continue;
    }
    ++tested;
    CHECK(b.x == doctest::Approx(a.x).epsilon(1e-6));
    CHECK(b.y == doctest::Approx(-a.y).epsilon(1e-6));
    CHECK(b.theta == doctest::Approx(-a.theta).epsilon(1e-6));
  }
  CHECK(tested > 60);
}

TEST_CASE("frame invariance: rotating the configuration rotates the solution") {
  const GaitParams g = hexapod_gait();
  const ShapePoint p = interior_point(kHexapod, g);
  const ContactSnapshot snap = build_contact_snapshot(kHexapod, g, p);
  const BodyVelocity a = solve_body_velocity(kHexapod.friction, snap, {1.0, 1.0});
  for (double beta : {0.4, 1.7, -2.3}) {
    const BodyVelocity b = solve_body_velocity(kHexapod.friction, rotated(snap, beta), {1.0, 1.0});
    const Vec2 expect = rotate({a.x, a.y}, beta);
    CHECK(b.x == doctest::Approx(expect.x).epsilon(1e-6));
    CHECK(b.y == doctest::Approx(expect.y).epsilon(1e-6));
    CHECK(b.theta == doctest::Approx(a.theta).epsilon(1e-6));
  }
}

TEST_CASE("local connection structure") {
  // Zero-amplitude spec: no shape motion moves the contacts, so A ~ 0.
  RobotSpec still = kHexapod;
  still.amplitude_theta = 0.0;
  still.amplitude_alpha = 0.0;
  const GaitParams gs = GaitParams::for_robot(still, 0.6, 0.3, UndulationMode::coordinated);
  const LocalConnection a0 = local_connection_at(still, gs, interior_point(still, gs));
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 2; ++c) CHECK(std::fabs(a0.a[r][c]) < 1e-8);

  // Fixed straight back: the body-phase column vanishes.
  GaitParams straight = hexapod_gait();
  straight.undulation = UndulationMode::fixed_straight;
  const LocalConnection a1 =
      local_connection_at(kHexapod, straight, interior_point(kHexapod, straight));
  for (int r = 0; r < 3; ++r) CHECK(std::fabs(a1.a[r][1]) < 1e-8);

  // Directionally exact solve vs column-sum linearization: both finite;
  // the discrepancy is the Coulomb linearization error, reported not bounded.
  const GaitParams g = hexapod_gait();
  const ShapePoint p = interior_point(kHexapod, g);
  const LocalConnection a = local_connection_at(kHexapod, g, p);
  const BodyVelocity exact = solve_body_velocity(kHexapod, g, p, {1.0, 1.0});
  const BodyVelocity lin = a.apply({1.0, 1.0});
  for (double v : {exact.x, exact.y, exact.theta, lin.x, lin.y, lin.theta})
    CHECK(std::isfinite(v));
  MESSAGE("coulomb linearization error: " << std::fabs(exact.x - lin.x) << ", "
                                          << std::fabs(exact.y - lin.y) << ", "
                                          << std::fabs(exact.theta - lin.theta));
}

TEST_CASE("no-support shape points are rejected with the phase in the message") {
  // D small enough that some phases have no stance feet on a quadruped.
  const RobotSpec quad = make_reference_robot("quadruped");
  const GaitParams g = GaitParams::for_robot(quad, 0.25, 0.0);
  bool found = false;
  for (double phi = 0.0; phi < kTwoPi && !found; phi += 0.05) {
    try {
      solve_body_velocity(quad, g, {phi, phi}, {1.0, 1.0});
    } catch (const NoSupportError& e) {
      found = true;
      CHECK(std::string(e.what()).find("phi_c") != std::string::npos);
    }
  }
  CHECK(found);
}
