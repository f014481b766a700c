#pragma once

// Reference computations that share no code with the library. Long double
// throughout so that they sit well below the tolerances they check.

#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>

namespace oracle {

using ld = long double;

inline const ld kPi = std::acos(-1.0L);

struct Joint {
  ld k;
  ld phi;
};

// Straight run A=(0,0) -> P=(s2,0), then an arc of length s1 leaving P
// tangent to +x and bending toward +y with central angle 2*theta, ending at
// B. Returns |AB| and the angle of AB seen from A.
inline Joint planar_joint(ld s1, ld s2, ld theta) {
  const ld radius = s1 / (2.0L * theta);
  const ld cx = s2;
  const ld cy = radius;
  const ld bx = cx + radius * std::sin(2.0L * theta);
  const ld by = cy - radius * std::cos(2.0L * theta);
  return {std::hypot(bx, by), std::atan2(by, bx)};
}

// Area between an arc (length s1, central angle 2*theta) and its chord,
// by the shoelace formula over `n` inscribed chords. Relative error ~1/n^2.
inline ld arc_segment_area_polygon(ld s1, ld theta, std::size_t n) {
  if (theta == 0.0L) return 0.0L;
  const ld radius = s1 / (2.0L * theta);
  ld twice_area = 0.0L;
  ld px = radius * std::sin(-theta);
  ld py = radius * std::cos(-theta);
  const ld x0 = px;
  const ld y0 = py;
  for (std::size_t i = 1; i <= n; ++i) {
    const ld a = -theta + 2.0L * theta * static_cast<ld>(i) / static_cast<ld>(n);
    const ld qx = radius * std::sin(a);
    const ld qy = radius * std::cos(a);
    twice_area += px * qy - qx * py;
    px = qx;
    py = qy;
  }
  twice_area += px * y0 - x0 * py;  // chord back to the start
  return std::abs(twice_area) / 2.0L;
}

// Closed-form circular-segment area; used where the polygon is too slow.
inline ld arc_segment_area(ld s1, ld theta) {
  if (theta == 0.0L) return 0.0L;
  const ld radius = s1 / (2.0L * theta);
  return radius * radius * (2.0L * theta - std::sin(2.0L * theta)) / 2.0L;
}

// Grid scan of a continuous function on [lo, hi]. Returns the first
// sub-interval whose end values differ in sign (or hit zero).
template <class F>
std::optional<std::pair<double, double>> sign_change_bracket(F f, double lo, double hi,
                                                             std::size_t points) {
  double x_prev = lo;
  double f_prev = f(lo);
  if (f_prev == 0.0) return std::pair{lo, lo};
  for (std::size_t i = 1; i < points; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    const double fx = f(x);
    if (fx == 0.0 || (fx > 0.0) != (f_prev > 0.0)) return std::pair{x_prev, x};
    x_prev = x;
    f_prev = fx;
  }
  return std::nullopt;
}

// Half central angle at which the planar joint angle stops increasing,
// scanned on [0, pi/2].
inline ld scan_theta_cap(ld s1, ld s2, std::size_t points) {
  ld best_theta = 0.0L;
  ld best_phi = -1.0L;
  for (std::size_t i = 1; i < points; ++i) {
    const ld theta = (kPi / 2.0L) * static_cast<ld>(i) / static_cast<ld>(points - 1);
    const ld phi = planar_joint(s1, s2, theta).phi;
    if (phi > best_phi) {
      best_phi = phi;
      best_theta = theta;
    }
  }
  return best_theta;
}

inline double relative_error(ld value, ld reference) {
  return static_cast<double>(std::abs(value - reference) / std::abs(reference));
}

}  // namespace oracle
