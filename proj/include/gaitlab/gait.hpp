#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "gaitlab/core.hpp"
#include "gaitlab/morphology.hpp"

namespace gaitlab {

enum class UndulationMode { fixed_straight, coordinated };

/// Extended Hildebrand gait parameters. duty_factor D is the stance fraction
/// of the cycle, lateral_phase_lag the cycle fraction between consecutive
/// ipsilateral legs. phi_0 is the constant offset between the body-undulation
/// phase and the contact phase (phi_b = phi_c + phi_0).
struct GaitParams {
  double duty_factor = 0.5;
  double lateral_phase_lag = 0.5;
  double amplitude_theta = 0.0;  // radians
  double amplitude_alpha = 0.0;  // radians
  double phi_0 = 0.0;            // radians
  UndulationMode undulation = UndulationMode::fixed_straight;
  std::optional<double> body_wave_lag;  // defaults to lateral_phase_lag

  static constexpr double kMinDutyFactor = 0.05;

  double effective_body_lag() const {
    return body_wave_lag.value_or(lateral_phase_lag);
  }

  double effective_amplitude_alpha() const {
    return undulation == UndulationMode::fixed_straight ? 0.0 : amplitude_alpha;
  }

  void validate() const {
    if (!(duty_factor > 0.0 && duty_factor <= 1.0))
      throw std::invalid_argument("GaitParams: duty factor must be in (0, 1]");
    if (duty_factor < kMinDutyFactor)
      throw std::invalid_argument("GaitParams: duty factor below supported minimum 0.05");
    if (!(lateral_phase_lag >= 0.0 && lateral_phase_lag < 1.0))
      throw std::invalid_argument("GaitParams: lateral phase lag must be in [0, 1)");
    if (body_wave_lag && !(*body_wave_lag >= 0.0 && *body_wave_lag < 1.0))
      throw std::invalid_argument("GaitParams: body wave lag must be in [0, 1)");
  }

  static GaitParams for_robot(const RobotSpec& spec, double d, double phi_lat,
                              UndulationMode mode = UndulationMode::fixed_straight,
                              double phi0 = 0.0) {
    GaitParams g;
    g.duty_factor = d;
    g.lateral_phase_lag = phi_lat;
    g.amplitude_theta = spec.amplitude_theta;
    g.amplitude_alpha = spec.amplitude_alpha;
    g.undulation = mode;
    g.phi_0 = phi0;
    g.validate();
    return g;
  }
};

/// Point on the 2-torus shape space: contact phase and body-undulation phase.
struct ShapePoint {
  double phi_c = 0.0;
  double phi_b = 0.0;
};

struct ShapeVelocity {
  double dphi_c = 0.0;
  double dphi_b = 0.0;
};

namespace detail {

inline int base_contact(double duty_factor, double phase) {
  return wrap_2pi(phase) < kTwoPi * duty_factor ? 1 : 0;
}

/// Shoulder waveform of the reference leg: stance sweeps +A -> -A, swing
/// returns -A -> +A, continuous at both breakpoints.
inline double shoulder_base(double duty_factor, double amplitude, double phase) {
  const double m = wrap_2pi(phase);
  const double stance = kTwoPi * duty_factor;
  if (duty_factor >= 1.0 || m < stance)
    return amplitude * std::cos(m / (2.0 * duty_factor));
  return -amplitude * std::cos((m - stance) / (2.0 * (1.0 - duty_factor)));
}

inline double ipsilateral_shift(const GaitParams& g, int pair) {
  return -kTwoPi * pair * g.lateral_phase_lag;
}

inline void check_pair(int pair, int n_pairs) {
  if (pair < 0 || pair >= n_pairs)
    throw std::out_of_range("gait: leg pair index out of range");
}

}  // namespace detail

/// Contact state of leg `pair` (0-based, head first) at contact phase phi_c.
/// Contralateral legs are half a cycle out of phase.
inline int contact_state(const GaitParams& g, int n_pairs, double phi_c, int pair, Side side) {
  detail::check_pair(pair, n_pairs);
  double phase = phi_c + detail::ipsilateral_shift(g, pair);
  if (side == Side::right) phase += kPi;
  return detail::base_contact(g.duty_factor, phase);
}

/// Anterior/posterior shoulder excursion of leg `pair` at phase phi_c.
/// For D = 1 the stance branch covers the whole cycle (degenerate duty
/// factor; the swing branch is undefined there).
inline double shoulder_angle(const GaitParams& g, int n_pairs, double phi_c, int pair, Side side) {
  detail::check_pair(pair, n_pairs);
  double phase = phi_c + detail::ipsilateral_shift(g, pair);
  if (side == Side::right) phase += kPi;
  return detail::shoulder_base(g.duty_factor, g.amplitude_theta, phase);
}

/// Lateral bend of body joint `joint` (0-based, head first) at body phase
/// phi_b: a wave travelling head to tail.
inline double body_bend(const GaitParams& g, double phi_b, int joint, int n_joints) {
  if (joint < 0 || joint >= n_joints)
    throw std::out_of_range("gait: body joint index out of range");
  const double a = g.effective_amplitude_alpha();
  return a * std::cos(phi_b - kTwoPi * joint * g.effective_body_lag());
}

/// Contact state of body link `link` of a sidewinder: the one-sided
/// Hildebrand formula applied per link.
inline int sidewinder_contact(const GaitParams& g, int n_links, double phi_c, int link) {
  if (link < 0 || link >= n_links)
    throw std::out_of_range("gait: sidewinder link index out of range");
  return detail::base_contact(g.duty_factor,
                              phi_c - kTwoPi * link * g.lateral_phase_lag);
}

/// Assemble the full joint/contact configuration at a shape point.
inline Configuration configuration_at(const RobotSpec& spec, const GaitParams& g,
                                      const ShapePoint& p) {
  Configuration cfg;
  cfg.body_joint_angles.resize(static_cast<std::size_t>(spec.n_body_joints));
  for (int j = 0; j < spec.n_body_joints; ++j)
    cfg.body_joint_angles[static_cast<std::size_t>(j)] =
        body_bend(g, p.phi_b, j, spec.n_body_joints);

  if (spec.mode == MorphologyMode::legged) {
    const auto n = static_cast<std::size_t>(spec.n_leg_pairs);
    cfg.shoulder_angles_left.resize(n);
    cfg.shoulder_angles_right.resize(n);
    cfg.contact_left.resize(n);
    cfg.contact_right.resize(n);
    for (int i = 0; i < spec.n_leg_pairs; ++i) {
      cfg.shoulder_angles_left[static_cast<std::size_t>(i)] =
          shoulder_angle(g, spec.n_leg_pairs, p.phi_c, i, Side::left);
      cfg.shoulder_angles_right[static_cast<std::size_t>(i)] =
          shoulder_angle(g, spec.n_leg_pairs, p.phi_c, i, Side::right);
      cfg.contact_left[static_cast<std::size_t>(i)] =
          contact_state(g, spec.n_leg_pairs, p.phi_c, i, Side::left);
      cfg.contact_right[static_cast<std::size_t>(i)] =
          contact_state(g, spec.n_leg_pairs, p.phi_c, i, Side::right);
    }
  } else {
    cfg.contact_left.resize(static_cast<std::size_t>(spec.n_links()));
    for (int i = 0; i < spec.n_links(); ++i)
      cfg.contact_left[static_cast<std::size_t>(i)] =
          sidewinder_contact(g, spec.n_links(), p.phi_c, i);
  }
  return cfg;
}

enum class SpeedRegion { walk, run, boundary };
enum class SequenceRegion { lateral_sequence, diagonal_sequence, boundary };

struct HildebrandRegion {
  SpeedRegion speed;
  SequenceRegion sequence;
};

/// Quadrant of the Hildebrand plot: walk vs run by duty factor, lateral vs
/// diagonal sequence by phase lag.
inline HildebrandRegion hildebrand_region(double duty_factor, double lateral_phase_lag) {
  HildebrandRegion r{};
  if (duty_factor > 0.5)
    r.speed = SpeedRegion::walk;
  else if (duty_factor < 0.5)
    r.speed = SpeedRegion::run;
  else
    r.speed = SpeedRegion::boundary;
  if (lateral_phase_lag < 0.5)
    r.sequence = SequenceRegion::lateral_sequence;
  else if (lateral_phase_lag > 0.5)
    r.sequence = SequenceRegion::diagonal_sequence;
  else
    r.sequence = SequenceRegion::boundary;
  return r;
}

/// Contact-switch phases (stance onsets and offsets) of a gait within one
/// cycle, sorted and deduplicated. Used to keep samplers and integrators off
/// the discontinuities of the contact set.
inline std::vector<double> contact_switch_phases(const RobotSpec& spec, const GaitParams& g) {
  std::vector<double> events;
  const double stance = kTwoPi * g.duty_factor;
  if (g.duty_factor < 1.0) {
    if (spec.mode == MorphologyMode::legged) {
      for (int i = 0; i < spec.n_leg_pairs; ++i) {
        const double shift = detail::ipsilateral_shift(g, i);
        events.push_back(wrap_2pi(-shift));
        events.push_back(wrap_2pi(stance - shift));
        events.push_back(wrap_2pi(-shift - kPi));
        events.push_back(wrap_2pi(stance - shift - kPi));
      }
    } else {
      for (int i = 0; i < spec.n_links(); ++i) {
        const double shift = -kTwoPi * i * g.lateral_phase_lag;
        events.push_back(wrap_2pi(-shift));
        events.push_back(wrap_2pi(stance - shift));
      }
    }
  }
  std::sort(events.begin(), events.end());
  std::vector<double> out;
  for (double e : events) {
    if (out.empty() || e - out.back() > 1e-12) out.push_back(e);
  }
  if (!out.empty() && out.front() < 1e-12 && kTwoPi - out.back() < 1e-12) out.pop_back();
  return out;
}

}  // namespace gaitlab
