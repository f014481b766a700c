#pragma once

// Planar kinematic locomotion: stride increments per gait mode, pose
// integration along a servo schedule, calibration against measured speeds
// and turn times, and a greedy waypoint follower.
//
// Units: centimetres, radians, seconds. Heading is counter-clockwise
// positive and never wrapped.

#include <cstddef>
#include <span>
#include <vector>

#include "bests/gait.hpp"

namespace bests::locomotion {

using gait::GaitMode;

struct Pose {
  double x_cm = 0.0;
  double y_cm = 0.0;
  double heading_rad = 0.0;
};

struct Point {
  double x_cm = 0.0;
  double y_cm = 0.0;
};

// Measured performance the stride model is fitted to.
struct CalibrationTargets {
  double body_length_cm = 25.0;
  double speed_cm_s = 1.75;
  double walk_period_s = 2.8;
  double left_turn_90_s = 54.0;
  double left_period_s = 4.0;
  double right_turn_90_s = 38.0;
  double right_period_s = 3.0;
  double turn_radius_cm = 15.0;
  double terrain_efficiency = 1.0;

  void validate() const;  // throws ValidationError naming the field
};

struct Calibration {
  double body_length_cm = 25.0;
  double stride_walk_cm = 4.9;      // per walk cycle
  double dtheta_left_rad = 0.1164;  // per left-turn cycle
  double dtheta_right_rad = 0.124;  // per right-turn cycle
  double turn_radius_cm = 15.0;
  double terrain_efficiency = 1.0;

  void validate() const;
};

// Closed-form inversion of the targets:
//   stride = speed * walk_period,
//   dtheta = (pi / 2) / (turn_90_time / period).
Calibration calibrate(const CalibrationTargets& targets);

struct Increment {
  double forward_cm;    // arc length travelled
  double dheading_rad;  // signed heading change
};

// Motion over one half-cycle of the given mode.
Increment stride_increment(GaitMode mode, const Calibration& calib);

// Rigid motion along the arc described by `inc` scaled by `fraction`.
Pose advance(const Pose& pose, const Increment& inc, double fraction = 1.0);

Pose step(Pose pose, GaitMode mode, int half_cycles, const Calibration& calib);

// Pose after running the schedule from t0 to t1, starting at `pose`. Motion
// accrues continuously at one half-cycle per half sweep period, split
// exactly at phase-map boundaries.
Pose integrate(const gait::ServoSchedule& schedule, const Calibration& calib,
               double t0, double t1, Pose pose);

struct TrajectorySample {
  double t;
  Pose pose;
  GaitMode mode;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;

  const Pose& final_pose() const { return samples.back().pose; }
  double duration() const { return samples.back().t; }
};

// Samples every dt from 0 to the schedule end, always including the end.
Trajectory simulate(const gait::ServoSchedule& schedule,
                    const Calibration& calib, double dt, Pose start = {});

// First time |heading - heading(0)| reaches `delta_rad`, linearly
// interpolated between samples; negative if never reached.
double time_to_heading_change(const Trajectory& traj, double delta_rad);

struct Circle {
  double cx_cm;
  double cy_cm;
  double radius_cm;
  double rms_residual_cm;
};

// Algebraic least-squares circle through the trajectory positions.
Circle fit_circle(std::span<const Point> points);
Circle fit_circle(const Trajectory& traj);

struct PlannerOptions {
  double walk_period_s = 2.8;
  double left_period_s = 4.0;
  double right_period_s = 3.0;
  double initial_heading_rad = 0.0;
  double capture_radius_cm = 0.0;  // 0 selects one walk stride
  std::size_t max_cycles = 20000;
  double dt_s = 0.1;
};

struct PathPlan {
  gait::ServoSchedule schedule;
  Trajectory trajectory;
};

// Greedy follower: from waypoints[0], turn on the calibrated arc toward the
// next waypoint until the heading error is below half a turn cycle, then
// walk, one cycle at a time. A waypoint counts as reached within the capture
// radius, or once it falls inside the turning circle after a corner.
// Throws PlanningError naming the waypoint when a corner of the path bends
// tighter than the turning radius, when the first waypoint starts inside the
// turning circle, or when max_cycles runs out.
PathPlan follow_path(std::span<const Point> waypoints, const Calibration& calib,
                     const PlannerOptions& options = {});

// Built-in demonstration curves. Both start at the origin heading +x.
// The S curve is a left semicircle followed by a right semicircle; the O
// curve is one clockwise loop. Each ends with a short straight run so the
// final heading matches the curve's exit tangent.
std::vector<Point> s_curve_waypoints(double radius_cm, int points_per_arc);
std::vector<Point> o_curve_waypoints(double radius_cm, int points);

inline constexpr double kDefaultSCurveRadiusCm = 20.0;
inline constexpr int kDefaultSCurvePointsPerArc = 5;
inline constexpr double kDefaultOCurveRadiusCm = 25.0;
inline constexpr int kDefaultOCurvePoints = 12;

}  // namespace bests::locomotion
