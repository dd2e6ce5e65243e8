#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gaitlab/analysis.hpp"
#include "gaitlab/gait.hpp"
#include "gaitlab/morphology.hpp"

using namespace gaitlab;

namespace {

/// Synthetic dataset generated through the prescription module: the robot's
/// joint series over `cycles` cycles of period `period` with phi_b = phi_c +
/// phi_0.
TrajectoryDataset synthesize(const RobotSpec& spec, const GaitParams& g, double period,
                             int cycles, int per_cycle) {
  TrajectoryDataset data;
  const int n = cycles * per_cycle;
  for (int k = 0; k < n; ++k) data.time.push_back(k * period / per_cycle);

  for (int pair = 0; pair < spec.n_leg_pairs; ++pair)
    for (Side side : {Side::left, Side::right}) {
      TrajectoryDataset::LegSeries series;
      series.side = side;
      series.pair_index = pair;
      for (double t : data.time) {
        const double phi_c = kTwoPi * t / period;
        series.values.push_back(shoulder_angle(g, spec.n_leg_pairs, phi_c, pair, side));
      }
      data.legs.push_back(std::move(series));
    }
  for (int joint = 0; joint < spec.n_body_joints; ++joint) {
    std::vector<double> series;
    for (double t : data.time) {
      const double phi_b = kTwoPi * t / period + g.phi_0;
      series.push_back(body_bend(g, phi_b, joint, spec.n_body_joints));
    }
    data.body_joints.push_back(std::move(series));
  }
  return data;
}

}  // namespace

TEST_CASE("leg fit recovers duty factor from a noiseless series") {
  const RobotSpec hex = make_reference_robot("hexapod");
  const GaitParams g = GaitParams::for_robot(hex, 0.6, 0.3, UndulationMode::coordinated);
  const TrajectoryDataset data = synthesize(hex, g, 2.0, 4, 48);
  const LegFit fit = fit_leg_model(data.legs[0].values, data.time);
  CHECK(!fit.degenerate);
  CHECK(fit.duty_factor == doctest::Approx(0.6).epsilon(0.017));
  CHECK(fit.amplitude == doctest::Approx(hex.amplitude_theta).epsilon(0.02));
  CHECK(fit.period == doctest::Approx(2.0).epsilon(0.01));
  CHECK(fit.residual < 1e-3);
}

TEST_CASE("constant-zero series is rejected as degenerate") {
  std::vector<double> time, series;
  for (int k = 0; k < 200; ++k) {
    time.push_back(0.01 * k);
    series.push_back(0.0);
  }
  const LegFit fit = fit_leg_model(series, time);
  CHECK(fit.degenerate);
}

TEST_CASE("5 percent noise keeps the duty factor within 0.05") {
  const RobotSpec hex = make_reference_robot("hexapod");
  const GaitParams g = GaitParams::for_robot(hex, 0.6, 0.3, UndulationMode::coordinated);
  TrajectoryDataset data = synthesize(hex, g, 2.0, 4, 48);
  std::mt19937 rng(1234);
  std::normal_distribution<double> noise(0.0, 0.05 * hex.amplitude_theta);
  for (double& v : data.legs[0].values) v += noise(rng);
  const LegFit fit = fit_leg_model(data.legs[0].values, data.time);
  CHECK(!fit.degenerate);
  CHECK(fit.duty_factor == doctest::Approx(0.6).epsilon(0.084));
}

TEST_CASE("lateral phase lag estimation") {
  // Tripod: consecutive ipsilateral legs half a cycle apart.
  const RobotSpec hex = make_reference_robot("hexapod");
  const GaitParams tripod = GaitParams::for_robot(hex, 0.5, 0.5, UndulationMode::coordinated);
  const GaitEstimate est = estimate_gait(synthesize(hex, tripod, 2.0, 4, 48));
  CHECK(est.lateral_phase_lag == doctest::Approx(0.5).epsilon(0.021));

  // All legs in phase.
  CHECK(estimate_lateral_phase_lag({1.3, 1.3, 1.3}) == doctest::Approx(0.0));

  // Diagonal-sequence myriapod lag lands on the correct side of 0.5.
  const RobotSpec myr = make_reference_robot("myriapod");
  const GaitParams ds = GaitParams::for_robot(myr, 0.5, 0.92, UndulationMode::coordinated);
  const GaitEstimate est_ds = estimate_gait(synthesize(myr, ds, 2.0, 4, 48));
  CHECK(est_ds.lateral_phase_lag == doctest::Approx(0.92).epsilon(0.011));
  CHECK(est_ds.lateral_phase_lag > 0.5);

  CHECK_THROWS_AS(estimate_lateral_phase_lag({1.0}), std::invalid_argument);
}

TEST_CASE("two-term Fourier fit") {
  std::vector<double> time;
  for (int k = 0; k < 400; ++k) time.push_back(0.01 * k);
  const double period = 1.3, amp = 0.4;

  std::vector<double> pure;
  for (double t : time) pure.push_back(amp * std::cos(kTwoPi * t / period));
  const BodyFourierFit fit = fit_body_fourier(pure, time, period);
  CHECK(fit.a1 == doctest::Approx(amp).epsilon(1e-6));
  CHECK(std::fabs(fit.b1) < 1e-6);
  CHECK(std::fabs(fit.a2) < 1e-6);
  CHECK(std::fabs(fit.a0) < 1e-6);
  CHECK(!fit.non_oscillatory);

  // Body-wave synthetic: recovered phase within 0.02 rad.
  const double phase = 1.1;
  std::vector<double> wave;
  for (double t : time) wave.push_back(0.2 * std::cos(kTwoPi * t / period - phase));
  const BodyFourierFit wfit = fit_body_fourier(wave, time, period);
  CHECK(std::fabs(wrap_pi(wfit.phase - phase)) < 0.02);

  std::vector<double> dc(time.size(), 0.7);
  const BodyFourierFit dcfit = fit_body_fourier(dc, time, period);
  CHECK(dcfit.a0 == doctest::Approx(0.7).epsilon(1e-9));
  CHECK(dcfit.non_oscillatory);
}

TEST_CASE("phi_bc estimation round trip") {
  CHECK(estimate_phi_bc(1.2, 1.2) == doctest::Approx(0.0));

  const RobotSpec hex = make_reference_robot("hexapod");
  const GaitParams g =
      GaitParams::for_robot(hex, 0.6, 0.3, UndulationMode::coordinated, kPi / 3.0);
  const GaitEstimate est = estimate_gait(synthesize(hex, g, 2.0, 4, 64));
  CHECK(std::fabs(wrap_pi(est.phi_bc - (kTwoPi - kPi / 3.0))) < 0.02);
}

TEST_CASE("phase-shift equivariance") {
  const RobotSpec hex = make_reference_robot("hexapod");
  const GaitParams g = GaitParams::for_robot(hex, 0.55, 0.4, UndulationMode::coordinated, 0.9);
  TrajectoryDataset a = synthesize(hex, g, 2.0, 4, 48);
  TrajectoryDataset b = a;
  const double shift = 0.31;
  for (double& t : b.time) t += shift;

  const GaitEstimate ea = estimate_gait(a);
  const GaitEstimate eb = estimate_gait(b);
  CHECK(std::fabs(ea.duty_factor - eb.duty_factor) < 1e-6);
  CHECK(std::fabs(ea.lateral_phase_lag - eb.lateral_phase_lag) < 1e-6);
  // All fitted phases shift by the same amount, so phi_bc is unchanged.
  CHECK(std::fabs(wrap_pi(ea.phi_bc - eb.phi_bc)) < 1e-4);
}

TEST_CASE("dataset validation") {
  TrajectoryDataset bad;
  bad.time = {0.0, 0.1};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK_THROWS_AS(estimate_gait(bad), std::invalid_argument);
}
