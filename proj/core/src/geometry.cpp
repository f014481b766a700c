#include "bests/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "bests/errors.hpp"

namespace bests::geometry {
namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

// sin(x) / x without the removable singularity.
double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

// (x - sin x) / x^3. The direct form cancels badly for small x.
double x_minus_sin_over_cube(double x) {
  if (std::abs(x) < 0.1) {
    const double x2 = x * x;
    return 1.0 / 6.0 -
           x2 * (1.0 / 120.0 -
                 x2 * (1.0 / 5040.0 - x2 * (1.0 / 362880.0 - x2 / 39916800.0)));
  }
  return (x - std::sin(x)) / (x * x * x);
}

// Location of the bend maximum for a unit-radius segment with split beta.
// For beta >= 1/2 the joint angle is non-decreasing all the way to the
// fold-over angle pi/2; below that it peaks earlier.
double find_theta_cap(double beta) {
  if (beta >= 0.5 || beta == 0.0) return kHalfPi;
  const double s1 = beta;
  const double s2 = 1.0 - beta;
  auto phi = [&](double theta) { return joint_bend(s1, s2, theta).phi; };

  const double inv_golden = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0;
  double hi = kHalfPi;
  double x1 = hi - inv_golden * (hi - lo);
  double x2 = lo + inv_golden * (hi - lo);
  double f1 = phi(x1);
  double f2 = phi(x2);
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_golden * (hi - lo);
      f2 = phi(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_golden * (hi - lo);
      f1 = phi(x1);
    }
  }
  return 0.5 * (lo + hi);
}

void require_curvature(double rho) {
  if (!(rho >= 0.0)) {
    std::ostringstream msg;
    msg << "curvature must be >= 0 (got " << rho << ")";
    throw DomainError(msg.str());
  }
}

}  // namespace

const char* to_string(SizeClass size_class) {
  return size_class == SizeClass::kLarge ? "large" : "small";
}

SegmentGeometry::SegmentGeometry(double radius_mm, double beta, double depth_mm)
    : radius_(radius_mm), beta_(beta), depth_(depth_mm) {
  if (!(radius_mm > 0.0) || !std::isfinite(radius_mm)) {
    throw DomainError("segment radius must be positive");
  }
  if (!(depth_mm > 0.0) || !std::isfinite(depth_mm)) {
    throw DomainError("segment depth must be positive");
  }
  if (!(beta >= 0.0 && beta < 1.0)) {
    throw DomainError("contact-release fraction beta must lie in [0, 1)");
  }
  arc_length_ = beta * radius_mm;
  straight_length_ = radius_mm - arc_length_;
  theta_cap_ = find_theta_cap(beta);
}

void BellowsUnit::validate() const {
  if (n_segments < 1) {
    throw DomainError("bellows unit '" + id + "' needs at least one segment");
  }
  if (!(v_flat_ml >= 0.0)) {
    throw DomainError("bellows unit '" + id + "' has negative flat volume");
  }
}

JointBend joint_bend(double s1, double s2, double theta) {
  // Chord of the arc, 2 R sin(theta), written without R = s1 / (2 theta).
  const double chord = s1 * sinc(theta);
  // Included angle between straight run and chord is pi - theta.
  const double k = std::sqrt(s2 * s2 + chord * chord +
                             2.0 * s2 * chord * std::cos(theta));
  if (k == 0.0) return {0.0, 0.0};
  const double s = std::clamp(chord * std::sin(theta) / k, -1.0, 1.0);
  return {k, std::asin(s)};
}

double central_angle(const SegmentGeometry& seg, double rho) {
  require_curvature(rho);
  return seg.arc_length() * rho / 2.0;
}

HalfSegmentBend half_segment_bend(const SegmentGeometry& seg, double rho) {
  require_curvature(rho);
  if (rho == 0.0) return {seg.radius(), 0.0, false};
  const double theta = central_angle(seg, rho);
  const bool saturated = seg.arc_length() > 0.0 && theta >= seg.theta_cap();
  const double effective = saturated ? seg.theta_cap() : theta;
  const JointBend jb =
      joint_bend(seg.arc_length(), seg.straight_length(), effective);
  return {jb.k, jb.phi, saturated};
}

BendState bend_state(const BellowsUnit& unit, double rho) {
  const HalfSegmentBend hb = half_segment_bend(unit.segment, rho);
  BendState state{};
  state.rho = rho;
  state.radius_of_curvature =
      rho == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / rho;
  state.theta = central_angle(unit.segment, rho);
  state.k = hb.k;
  state.phi = hb.phi;
  state.unit_bend = 2.0 * hb.phi * unit.n_segments;
  state.saturated = hb.saturated;
  return state;
}

double unit_bend(const BellowsUnit& unit, double rho) {
  return 2.0 * half_segment_bend(unit.segment, rho).phi * unit.n_segments;
}

double unit_volume(const BellowsUnit& unit, double rho) {
  const SegmentGeometry& seg = unit.segment;
  const double theta = std::min(central_angle(seg, rho), seg.theta_cap());
  // Circular segment of central angle x = 2 theta on radius R = s1 / x:
  // R^2 (x - sin x) / 2 = s1^2 x (x - sin x) / x^3 / 2.
  const double x = 2.0 * theta;
  const double s1 = seg.arc_length();
  const double area_mm2 = 0.5 * s1 * s1 * x * x_minus_sin_over_cube(x);
  const double volume_mm3 = unit.n_segments * area_mm2 * seg.depth();
  return volume_mm3 / 1000.0 + unit.v_flat_ml;
}

double saturation_curvature(const BellowsUnit& unit) {
  const SegmentGeometry& seg = unit.segment;
  if (seg.arc_length() == 0.0) return std::numeric_limits<double>::infinity();
  return 2.0 * seg.theta_cap() / seg.arc_length();
}

double max_unit_bend(const BellowsUnit& unit) {
  const SegmentGeometry& seg = unit.segment;
  if (seg.arc_length() == 0.0) return 0.0;
  return 2.0 * unit.n_segments *
         joint_bend(seg.arc_length(), seg.straight_length(), seg.theta_cap())
             .phi;
}

double max_unit_volume(const BellowsUnit& unit) {
  const double rho_sat = saturation_curvature(unit);
  if (std::isinf(rho_sat)) return unit.v_flat_ml;
  return unit_volume(unit, rho_sat);
}

}  // namespace bests::geometry
