#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace gaitlab {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

/// Reduce an angle to [0, 2*pi).
inline double wrap_2pi(double a) {
  double w = std::fmod(a, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  // fmod of a tiny negative can round up to exactly 2*pi
  if (w >= kTwoPi) w -= kTwoPi;
  return w;
}

/// Reduce an angle to (-pi, pi].
inline double wrap_pi(double a) {
  double w = wrap_2pi(a);
  return w > kPi ? w - kTwoPi : w;
}

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  double norm() const { return std::hypot(x, y); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline Vec2 rotate(const Vec2& v, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

/// Planar rigid pose (x, y, heading).
struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;

  Vec2 position() const { return {x, y}; }

  /// Compose this * other (other expressed in this pose's frame).
  Pose2 compose(const Pose2& other) const {
    const Vec2 p = rotate(other.position(), heading);
    return {x + p.x, y + p.y, heading + other.heading};
  }

  Vec2 apply(const Vec2& p) const {
    const Vec2 q = rotate(p, heading);
    return {x + q.x, y + q.y};
  }
};

/// Solve a small dense linear system A x = b in place by Gaussian elimination
/// with partial pivoting. Returns false if the system is singular.
inline bool solve_linear(std::vector<std::vector<double>>& a, std::vector<double>& b,
                         std::vector<double>& x) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
    if (std::fabs(a[pivot][col]) < 1e-14) return false;
    std::swap(a[pivot], a[col]);
    std::swap(b[pivot], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  x.assign(n, 0.0);
  for (std::size_t ri = n; ri-- > 0;) {
    double s = b[ri];
    for (std::size_t c = ri + 1; c < n; ++c) s -= a[ri][c] * x[c];
    x[ri] = s / a[ri][ri];
  }
  return true;
}

/// Deterministic Nelder-Mead minimization of f over R^n from x0 with the
/// given initial simplex step per coordinate. Returns the best point found.
template <typename F>
inline std::vector<double> nelder_mead(F&& f, std::vector<double> x0,
                                       const std::vector<double>& init_step, int max_iter = 600,
                                       double ftol = 1e-14) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> sim(n + 1, x0);
  for (std::size_t k = 0; k < n; ++k) sim[k + 1][k] += init_step[k];
  std::vector<double> fv(n + 1);
  for (std::size_t k = 0; k <= n; ++k) fv[k] = f(sim[k]);

  std::vector<std::size_t> order(n + 1);
  for (int it = 0; it < max_iter; ++it) {
    for (std::size_t k = 0; k <= n; ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    if (fv[order[n]] - fv[order[0]] < ftol * (std::fabs(fv[order[0]]) + ftol)) break;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t d = 0; d < n; ++d) centroid[d] += sim[order[k]][d] / n;
    const std::vector<double>& worst = sim[order[n]];

    auto blend = [&](double t) {
      std::vector<double> p(n);
      for (std::size_t d = 0; d < n; ++d) p[d] = centroid[d] + t * (worst[d] - centroid[d]);
      return p;
    };
    const std::vector<double> refl = blend(-1.0);
    const double fr = f(refl);
    if (fr < fv[order[0]]) {
      const std::vector<double> expd = blend(-2.0);
      const double fe = f(expd);
      sim[order[n]] = fe < fr ? expd : refl;
      fv[order[n]] = std::min(fe, fr);
    } else if (fr < fv[order[n - 1]]) {
      sim[order[n]] = refl;
      fv[order[n]] = fr;
    } else {
      const std::vector<double> contr = blend(0.5);
      const double fc = f(contr);
      if (fc < fv[order[n]]) {
        sim[order[n]] = contr;
        fv[order[n]] = fc;
      } else {
        for (std::size_t k = 1; k <= n; ++k) {
          for (std::size_t d = 0; d < n; ++d)
            sim[order[k]][d] = 0.5 * (sim[order[k]][d] + sim[order[0]][d]);
          fv[order[k]] = f(sim[order[k]]);
        }
      }
    }
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k <= n; ++k)
    if (fv[k] < fv[best]) best = k;
  return sim[best];
}

/// Circular mean of angles in radians, result in [0, 2*pi).
inline double circular_mean(const std::vector<double>& angles) {
  if (angles.empty()) throw std::invalid_argument("circular_mean: empty input");
  double s = 0.0, c = 0.0;
  for (double a : angles) {
    s += std::sin(a);
    c += std::cos(a);
  }
  return wrap_2pi(std::atan2(s, c));
}

}  // namespace gaitlab
