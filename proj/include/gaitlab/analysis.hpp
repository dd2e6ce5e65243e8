#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "gaitlab/core.hpp"
#include "gaitlab/gait.hpp"
#include "gaitlab/parallel.hpp"

namespace gaitlab {

/// Joint-angle time series for one trial: per-leg shoulder angles with
/// side/pair labels plus per-joint body bend angles. Radians throughout.
struct TrajectoryDataset {
  struct LegSeries {
    Side side = Side::left;
    int pair_index = 0;  // 0-based, head first
    std::vector<double> values;
  };
  std::vector<double> time;
  std::vector<LegSeries> legs;
  std::vector<std::vector<double>> body_joints;

  void validate() const {
    if (time.size() < 8) throw std::invalid_argument("TrajectoryDataset: too few samples");
    for (const auto& l : legs)
      if (l.values.size() != time.size())
        throw std::invalid_argument("TrajectoryDataset: leg series length mismatch");
    for (const auto& b : body_joints)
      if (b.size() != time.size())
        throw std::invalid_argument("TrajectoryDataset: body series length mismatch");
  }
};

/// Fit of the piecewise-cosine shoulder waveform to one leg series. `phase`
/// is the psi in series(t) ~ waveform(2*pi*t/period - psi).
struct LegFit {
  double duty_factor = 0.5;
  double amplitude = 0.0;
  double phase = 0.0;
  double period = 1.0;
  double residual = 0.0;  // root-mean-square misfit
  bool degenerate = false;
};

struct BodyFourierFit {
  double a0 = 0.0, a1 = 0.0, b1 = 0.0, a2 = 0.0, b2 = 0.0;
  double phase = 0.0;  // atan2(b1, a1)
  bool non_oscillatory = false;
};

struct GaitEstimate {
  double duty_factor = 0.0;
  double lateral_phase_lag = 0.0;
  double amplitude_theta = 0.0;
  double period = 0.0;
  std::vector<double> leg_phases;  // fit order matches dataset legs
  double phi_bc = 0.0;
  std::vector<double> residuals;
};

namespace detail {

inline double leg_waveform(double duty, double amplitude, double phase) {
  return shoulder_base(duty, amplitude, phase);
}

inline double leg_fit_sse(const std::vector<double>& t, const std::vector<double>& y, double duty,
                          double amplitude, double psi, double period) {
  double sse = 0.0;
  const double omega = kTwoPi / period;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double e = y[k] - leg_waveform(duty, amplitude, omega * t[k] - psi);
    sse += e * e;
  }
  return sse;
}

/// Coarse period estimate: the candidate whose first harmonic carries the
/// most power.
inline double coarse_period(const std::vector<double>& t, const std::vector<double>& y) {
  const double duration = t.back() - t.front();
  double best_t = duration / 2.0, best_power = -1.0;
  for (int k = 0; k < 96; ++k) {
    const double period = duration / (1.2 + (8.0 - 1.2) * k / 95.0);
    const double omega = kTwoPi / period;
    double a = 0.0, b = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      a += y[i] * std::cos(omega * t[i]);
      b += y[i] * std::sin(omega * t[i]);
    }
    const double power = a * a + b * b;
    if (power > best_power) {
      best_power = power;
      best_t = period;
    }
  }
  return best_t;
}

}  // namespace detail

/// Nonlinear least squares of the shoulder waveform over (D, A, phase,
/// period), multi-started over 8 initial phases and D in {0.3, 0.5, 0.7}.
inline LegFit fit_leg_model(const std::vector<double>& series, const std::vector<double>& time) {
  if (series.size() != time.size() || time.size() < 16)
    throw std::invalid_argument("fit_leg_model: need matched series with >= 16 samples");
  const double duration = time.back() - time.front();
  if (duration <= 0.0) throw std::invalid_argument("fit_leg_model: non-increasing time");

  double rms = 0.0;
  for (double v : series) rms += v * v;
  rms = std::sqrt(rms / series.size());
  if (rms < 1e-9) {
    LegFit flat;
    flat.degenerate = true;
    flat.period = duration;
    return flat;
  }

  const double period0 = detail::coarse_period(time, series);
  const double amp0 = rms * std::sqrt(2.0);

  // Unconstrained parameterization: D through a tanh squash, period through
  // exp, amplitude through abs.
  auto unpack = [](const std::vector<double>& x) {
    const double duty = 0.5 + 0.4995 * std::tanh(x[0]);
    return std::array<double, 4>{duty, std::fabs(x[1]), x[2], std::exp(x[3])};
  };

  LegFit best;
  double best_sse = std::numeric_limits<double>::infinity();
  for (double d0 : {0.3, 0.5, 0.7}) {
    for (int ph = 0; ph < 8; ++ph) {
      std::vector<double> x0{std::atanh((d0 - 0.5) / 0.4995), amp0, ph * kPi / 4.0,
                             std::log(period0)};
      auto objective = [&](const std::vector<double>& x) {
        const auto p = unpack(x);
        return detail::leg_fit_sse(time, series, p[0], p[1], p[2], p[3]);
      };
      const std::vector<double> xf =
          nelder_mead(objective, x0, {0.2, 0.2 * amp0, 0.3, 0.05}, 900, 1e-16);
      const double sse = objective(xf);
      if (sse < best_sse) {
        best_sse = sse;
        const auto p = unpack(xf);
        best.duty_factor = p[0];
        best.amplitude = p[1];
        best.phase = wrap_2pi(p[2]);
        best.period = p[3];
      }
    }
  }
  if (!std::isfinite(best_sse)) throw std::runtime_error("fit_leg_model: no start converged");
  best.residual = std::sqrt(best_sse / series.size());
  best.degenerate = best.amplitude < std::max(1e-8, 1e-3 * rms);
  return best;
}

/// Lateral phase lag from fitted per-leg phases, ordered head to tail along
/// one side: circular mean of consecutive differences, as a cycle fraction.
/// Each posterior leg repeats its anterior neighbour delayed by the lag, so
/// its fitted phase is larger by 2*pi times the lag.
inline double estimate_lateral_phase_lag(const std::vector<double>& ipsilateral_phases) {
  if (ipsilateral_phases.size() < 2)
    throw std::invalid_argument("estimate_lateral_phase_lag: need >= 2 ipsilateral legs");
  std::vector<double> diffs;
  for (std::size_t i = 0; i + 1 < ipsilateral_phases.size(); ++i)
    diffs.push_back(wrap_2pi(ipsilateral_phases[i + 1] - ipsilateral_phases[i]));
  return circular_mean(diffs) / kTwoPi;
}

/// Two-term Fourier fit at a known period, by linear least squares.
inline BodyFourierFit fit_body_fourier(const std::vector<double>& series,
                                       const std::vector<double>& time, double period) {
  if (series.size() != time.size() || time.size() < 8)
    throw std::invalid_argument("fit_body_fourier: need matched series with >= 8 samples");
  if (period <= 0.0) throw std::invalid_argument("fit_body_fourier: period must be positive");
  const double omega = kTwoPi / period;

  std::vector<std::vector<double>> ata(5, std::vector<double>(5, 0.0));
  std::vector<double> atb(5, 0.0);
  for (std::size_t k = 0; k < time.size(); ++k) {
    const double t = time[k];
    const std::array<double, 5> row{1.0, std::cos(omega * t), std::sin(omega * t),
                                    std::cos(2.0 * omega * t), std::sin(2.0 * omega * t)};
    for (int i = 0; i < 5; ++i) {
      atb[static_cast<std::size_t>(i)] += row[static_cast<std::size_t>(i)] * series[k];
      for (int j = 0; j < 5; ++j)
        ata[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +=
            row[static_cast<std::size_t>(i)] * row[static_cast<std::size_t>(j)];
    }
  }
  std::vector<double> coef;
  if (!solve_linear(ata, atb, coef))
    throw std::runtime_error("fit_body_fourier: singular design matrix");

  BodyFourierFit fit;
  fit.a0 = coef[0];
  fit.a1 = coef[1];
  fit.b1 = coef[2];
  fit.a2 = coef[3];
  fit.b2 = coef[4];
  fit.phase = std::atan2(fit.b1, fit.a1);
  const double amp1 = std::hypot(fit.a1, fit.b1);
  fit.non_oscillatory = amp1 < std::max(1e-8, 1e-6 * std::fabs(fit.a0));
  return fit;
}

/// Body-leg phase lag phi_bc = phi_c - phi_b from the two fitted phases.
inline double estimate_phi_bc(double leg_phase, double body_phase) {
  return wrap_2pi(body_phase - leg_phase);
}

/// Full estimation pipeline over one dataset: leg fits, lateral phase lag
/// from ipsilateral phase differences, body Fourier fit at the leg period.
inline GaitEstimate estimate_gait(const TrajectoryDataset& data) {
  data.validate();
  if (data.legs.empty()) throw std::invalid_argument("estimate_gait: no leg series");

  std::vector<LegFit> fits(data.legs.size());
  parallel_for(fits.size(), [&](std::size_t i) {
    fits[i] = fit_leg_model(data.legs[i].values, data.time);
  });

  GaitEstimate est;
  double d_sum = 0.0, a_sum = 0.0, t_sum = 0.0;
  int used = 0;
  for (const LegFit& f : fits) {
    est.leg_phases.push_back(f.phase);
    est.residuals.push_back(f.residual);
    if (f.degenerate) continue;
    d_sum += f.duty_factor;
    a_sum += f.amplitude;
    t_sum += f.period;
    ++used;
  }
  if (used == 0) throw std::runtime_error("estimate_gait: all leg fits degenerate");
  est.duty_factor = d_sum / used;
  est.amplitude_theta = a_sum / used;
  est.period = t_sum / used;

  // Phase lags from each side with >= 2 fitted legs, averaged circularly.
  std::vector<double> lags;
  for (Side side : {Side::left, Side::right}) {
    std::vector<std::pair<int, double>> phases;
    for (std::size_t i = 0; i < data.legs.size(); ++i)
      if (data.legs[i].side == side && !fits[i].degenerate)
        phases.emplace_back(data.legs[i].pair_index, fits[i].phase);
    std::sort(phases.begin(), phases.end());
    if (phases.size() < 2) continue;
    std::vector<double> ordered;
    for (const auto& [pair, phase] : phases) ordered.push_back(phase);
    lags.push_back(estimate_lateral_phase_lag(ordered) * kTwoPi);
  }
  if (lags.empty())
    throw std::invalid_argument("estimate_gait: need >= 2 ipsilateral non-degenerate legs");
  est.lateral_phase_lag = circular_mean(lags) / kTwoPi;

  if (!data.body_joints.empty()) {
    const BodyFourierFit body = fit_body_fourier(data.body_joints.front(), data.time, est.period);
    // Reference leg: left pair 0 when present, else the first fitted leg.
    double leg_phase = fits[0].phase;
    for (std::size_t i = 0; i < data.legs.size(); ++i) {
      if (data.legs[i].side == Side::left && data.legs[i].pair_index == 0) {
        leg_phase = fits[i].phase;
        break;
      }
    }
    est.phi_bc = estimate_phi_bc(leg_phase, body.phase);
  }
  return est;
}

}  // namespace gaitlab
