#include "bests/locomotion.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "bests/errors.hpp"

namespace bests::locomotion {

using gait::ServoSchedule;
using gait::ServoSegment;

namespace {

constexpr double kQuarterTurn = std::numbers::pi / 2.0;

void require_positive(double value, const char* field) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ValidationError(field, "must be a positive number");
  }
}

// Moves `pose` across one sweep of a segment, from local time a to b.
// `sweep_start` is the local time the sweep began at.
Pose integrate_sweep(const ServoSegment& seg, const Calibration& calib,
                     double sweep_start, double from_phase, double to_phase,
                     double a, double b, Pose pose) {
  const double period = seg.period_s;
  const double half_period = 0.5 * period;
  std::array<double, 5> cuts{};
  std::size_t n_cuts = 0;
  cuts[n_cuts++] = a;
  const double span = to_phase - from_phase;
  if (span != 0.0) {
    for (double boundary : {gait::kWalkPhaseHi, gait::kTurnSplitPhase,
                            gait::kTurnRightPhaseHi}) {
      const double t = sweep_start + period * (boundary - from_phase) / span;
      if (t > a && t < b) cuts[n_cuts++] = t;
    }
  }
  std::sort(cuts.begin() + 1, cuts.begin() + n_cuts);
  cuts[n_cuts++] = b;

  for (std::size_t i = 0; i + 1 < n_cuts; ++i) {
    const double lo = cuts[i];
    const double hi = cuts[i + 1];
    if (!(hi > lo)) continue;
    const double mid = 0.5 * (lo + hi);
    const double phase = from_phase + span * (mid - sweep_start) / period;
    const GaitMode mode = gait::mode_of_phase(phase);
    pose = advance(pose, stride_increment(mode, calib), (hi - lo) / half_period);
  }
  return pose;
}

Pose integrate_segment(const ServoSegment& seg, const Calibration& calib,
                       double a, double b, Pose pose) {
  const double period = seg.period_s;
  double k = std::floor(a / period);
  while (k * period < b) {
    const double sweep_start = k * period;
    const double lo = std::max(a, sweep_start);
    const double hi = std::min(b, sweep_start + period);
    if (hi > lo) {
      const bool even = std::fmod(k, 2.0) == 0.0;
      const bool forward =
          even == (seg.direction == gait::SweepDirection::kForward);
      const double from = forward ? seg.phase_lo : seg.phase_hi;
      const double to = forward ? seg.phase_hi : seg.phase_lo;
      pose = integrate_sweep(seg, calib, sweep_start, from, to, lo, hi, pose);
    }
    k += 1.0;
  }
  return pose;
}

GaitMode mode_between(const ServoSchedule& schedule, double t0, double t1) {
  return gait::mode_of_phase(gait::servo_phase(schedule, 0.5 * (t0 + t1)));
}

double wrap_angle(double angle) {
  return std::remainder(angle, 2.0 * std::numbers::pi);
}

}  // namespace

void CalibrationTargets::validate() const {
  require_positive(body_length_cm, "body_length_cm");
  require_positive(speed_cm_s, "speed_cm_s");
  require_positive(walk_period_s, "walk_period_s");
  require_positive(left_turn_90_s, "left_turn_90_s");
  require_positive(left_period_s, "left_period_s");
  require_positive(right_turn_90_s, "right_turn_90_s");
  require_positive(right_period_s, "right_period_s");
  require_positive(turn_radius_cm, "turn_radius_cm");
  if (!(terrain_efficiency > 0.0 && terrain_efficiency <= 1.0)) {
    throw ValidationError("terrain_efficiency", "must lie in (0, 1]");
  }
}

void Calibration::validate() const {
  require_positive(body_length_cm, "body_length_cm");
  require_positive(stride_walk_cm, "stride_walk_cm");
  require_positive(dtheta_left_rad, "dtheta_left_rad");
  require_positive(dtheta_right_rad, "dtheta_right_rad");
  require_positive(turn_radius_cm, "turn_radius_cm");
  if (!(terrain_efficiency > 0.0 && terrain_efficiency <= 1.0)) {
    throw ValidationError("terrain_efficiency", "must lie in (0, 1]");
  }
  const double hi = std::max(dtheta_left_rad, dtheta_right_rad);
  const double lo = std::min(dtheta_left_rad, dtheta_right_rad);
  if (hi - lo > 0.5 * hi) {
    throw ValidationError("dtheta_right_rad",
                          "left and right turn rates differ by more than 50%");
  }
}

Calibration calibrate(const CalibrationTargets& targets) {
  targets.validate();
  Calibration calib;
  calib.body_length_cm = targets.body_length_cm;
  calib.stride_walk_cm = targets.speed_cm_s * targets.walk_period_s;
  calib.dtheta_left_rad =
      kQuarterTurn / (targets.left_turn_90_s / targets.left_period_s);
  calib.dtheta_right_rad =
      kQuarterTurn / (targets.right_turn_90_s / targets.right_period_s);
  calib.turn_radius_cm = targets.turn_radius_cm;
  calib.terrain_efficiency = targets.terrain_efficiency;
  calib.validate();
  return calib;
}

Increment stride_increment(GaitMode mode, const Calibration& calib) {
  switch (mode) {
    case GaitMode::kWalk:
      return {0.5 * calib.stride_walk_cm * calib.terrain_efficiency, 0.0};
    case GaitMode::kTurnLeft:
      return {0.5 * calib.dtheta_left_rad * calib.turn_radius_cm,
              0.5 * calib.dtheta_left_rad};
    case GaitMode::kTurnRight:
      return {0.5 * calib.dtheta_right_rad * calib.turn_radius_cm,
              -0.5 * calib.dtheta_right_rad};
  }
  return {0.0, 0.0};
}

Pose advance(const Pose& pose, const Increment& inc, double fraction) {
  const double ds = inc.forward_cm * fraction;
  const double dh = inc.dheading_rad * fraction;
  double dx = ds;  // body frame
  double dy = 0.0;
  if (dh != 0.0) {
    const double radius = ds / std::abs(dh);
    const double half = 0.5 * dh;
    dx = radius * std::sin(std::abs(dh));
    dy = std::copysign(2.0 * radius * std::sin(half) * std::sin(half), dh);
  }
  const double c = std::cos(pose.heading_rad);
  const double s = std::sin(pose.heading_rad);
  return {pose.x_cm + c * dx - s * dy, pose.y_cm + s * dx + c * dy,
          pose.heading_rad + dh};
}

Pose step(Pose pose, GaitMode mode, int half_cycles, const Calibration& calib) {
  const Increment inc = stride_increment(mode, calib);
  for (int i = 0; i < half_cycles; ++i) pose = advance(pose, inc);
  return pose;
}

Pose integrate(const ServoSchedule& schedule, const Calibration& calib,
               double t0, double t1, Pose pose) {
  double elapsed = 0.0;
  for (const ServoSegment& seg : schedule.segments) {
    const double d = seg.duration();
    const double a = std::max(t0, elapsed);
    const double b = std::min(t1, elapsed + d);
    if (b > a) pose = integrate_segment(seg, calib, a - elapsed, b - elapsed, pose);
    elapsed += d;
    if (elapsed >= t1) break;
  }
  return pose;
}

Trajectory simulate(const ServoSchedule& schedule, const Calibration& calib,
                    double dt, Pose start) {
  if (!(dt > 0.0)) throw ValidationError("dt", "time step must be positive");
  schedule.validate();
  const double total = schedule.duration();

  std::vector<double> times{0.0};
  if (total > 0.0) {
    const auto n = static_cast<std::size_t>(std::floor(total / dt + 1e-9));
    for (std::size_t k = 1; k <= n; ++k) {
      times.push_back(std::min(total, static_cast<double>(k) * dt));
    }
    if (total - times.back() > 1e-9 * std::max(1.0, total)) {
      times.push_back(total);
    }
  }

  Trajectory traj;
  traj.samples.reserve(times.size());
  traj.samples.push_back(
      {0.0, start, gait::mode_of_phase(gait::servo_phase(schedule, 0.0))});
  Pose pose = start;
  for (std::size_t i = 1; i < times.size(); ++i) {
    pose = integrate(schedule, calib, times[i - 1], times[i], pose);
    traj.samples.push_back(
        {times[i], pose, mode_between(schedule, times[i - 1], times[i])});
  }
  return traj;
}

double time_to_heading_change(const Trajectory& traj, double delta_rad) {
  const double h0 = traj.samples.front().pose.heading_rad;
  for (std::size_t i = 1; i < traj.samples.size(); ++i) {
    const double prev = std::abs(traj.samples[i - 1].pose.heading_rad - h0);
    const double cur = std::abs(traj.samples[i].pose.heading_rad - h0);
    if (cur >= delta_rad) {
      const double t0 = traj.samples[i - 1].t;
      const double t1 = traj.samples[i].t;
      if (cur == prev) return t1;
      return t0 + (t1 - t0) * (delta_rad - prev) / (cur - prev);
    }
  }
  return -1.0;
}

Circle fit_circle(std::span<const Point> points) {
  if (points.size() < 3) {
    throw DomainError("circle fit needs at least three points");
  }
  // x^2 + y^2 + D x + E y + F = 0, linear in (D, E, F).
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Point& p = points[static_cast<std::size_t>(i)];
    design(i, 0) = p.x_cm;
    design(i, 1) = p.y_cm;
    design(i, 2) = 1.0;
    rhs(i) = -(p.x_cm * p.x_cm + p.y_cm * p.y_cm);
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < 3) throw DomainError("circle fit points are collinear");
  const Eigen::Vector3d coef = qr.solve(rhs);
  Circle circle{};
  circle.cx_cm = -0.5 * coef(0);
  circle.cy_cm = -0.5 * coef(1);
  circle.radius_cm = std::sqrt(circle.cx_cm * circle.cx_cm +
                               circle.cy_cm * circle.cy_cm - coef(2));
  double sum_sq = 0.0;
  for (const Point& p : points) {
    const double r = std::hypot(p.x_cm - circle.cx_cm, p.y_cm - circle.cy_cm);
    sum_sq += (r - circle.radius_cm) * (r - circle.radius_cm);
  }
  circle.rms_residual_cm = std::sqrt(sum_sq / static_cast<double>(points.size()));
  return circle;
}

Circle fit_circle(const Trajectory& traj) {
  std::vector<Point> points;
  points.reserve(traj.samples.size());
  for (const auto& s : traj.samples) points.push_back({s.pose.x_cm, s.pose.y_cm});
  return fit_circle(points);
}

namespace {

class ScheduleBuilder {
 public:
  explicit ScheduleBuilder(const PlannerOptions& options) : options_(options) {}

  void add_cycle(GaitMode mode) {
    if (!segments_.empty() && mode == last_mode_) {
      segments_.back().cycles += 1.0;
      return;
    }
    close_segment();
    ServoSegment seg = segment_for(mode);
    const double to_lo = std::abs(phase_ - seg.phase_lo);
    const double to_hi = std::abs(phase_ - seg.phase_hi);
    seg.direction = to_lo <= to_hi ? gait::SweepDirection::kForward
                                   : gait::SweepDirection::kReverse;
    seg.cycles = 1.0;
    segments_.push_back(seg);
    last_mode_ = mode;
  }

  ServoSchedule finish() {
    close_segment();
    return ServoSchedule{segments_};
  }

 private:
  ServoSegment segment_for(GaitMode mode) const {
    switch (mode) {
      case GaitMode::kTurnLeft:
        return gait::turn_left_segment(options_.left_period_s, 1.0);
      case GaitMode::kTurnRight:
        return gait::turn_right_segment(options_.right_period_s, 1.0);
      case GaitMode::kWalk:
        break;
    }
    return gait::walk_segment(options_.walk_period_s, 1.0);
  }

  void close_segment() {
    if (!segments_.empty()) phase_ = segments_.back().end_phase();
  }

  const PlannerOptions& options_;
  std::vector<ServoSegment> segments_;
  GaitMode last_mode_ = GaitMode::kWalk;
  double phase_ = 0.0;
};

std::string describe(std::size_t index, const Point& p) {
  return "waypoint " + std::to_string(index) + " (" + std::to_string(p.x_cm) +
         ", " + std::to_string(p.y_cm) + ")";
}

void check_waypoint_curvature(std::span<const Point> waypoints,
                              double turn_radius_cm) {
  for (std::size_t i = 1; i + 1 < waypoints.size(); ++i) {
    const Point& a = waypoints[i - 1];
    const Point& b = waypoints[i];
    const Point& c = waypoints[i + 1];
    const double ab = std::hypot(b.x_cm - a.x_cm, b.y_cm - a.y_cm);
    const double bc = std::hypot(c.x_cm - b.x_cm, c.y_cm - b.y_cm);
    const double ca = std::hypot(a.x_cm - c.x_cm, a.y_cm - c.y_cm);
    if (ab == 0.0 || bc == 0.0) {
      throw PlanningError(describe(i, b) + " duplicates its neighbour", i);
    }
    const double cross = (b.x_cm - a.x_cm) * (c.y_cm - b.y_cm) -
                         (b.y_cm - a.y_cm) * (c.x_cm - b.x_cm);
    const double dot = (b.x_cm - a.x_cm) * (c.x_cm - b.x_cm) +
                       (b.y_cm - a.y_cm) * (c.y_cm - b.y_cm);
    if (cross == 0.0) {
      if (dot < 0.0) {
        throw PlanningError(describe(i, b) + " reverses the path direction", i);
      }
      continue;
    }
    // Circumradius of the corner a-b-c.
    const double circumradius = ab * bc * ca / (2.0 * std::abs(cross));
    if (circumradius < turn_radius_cm) {
      throw PlanningError(describe(i, b) + " bends the path on a radius of " +
                              std::to_string(circumradius) +
                              " cm, tighter than the turning radius of " +
                              std::to_string(turn_radius_cm) + " cm",
                          i);
    }
  }
}

}  // namespace

PathPlan follow_path(std::span<const Point> waypoints, const Calibration& calib,
                     const PlannerOptions& options) {
  if (waypoints.size() < 2) {
    throw PlanningError("path needs at least two waypoints", waypoints.size());
  }
  calib.validate();
  check_waypoint_curvature(waypoints, calib.turn_radius_cm);
  const double walk_step = calib.stride_walk_cm * calib.terrain_efficiency;
  const double capture =
      options.capture_radius_cm > 0.0 ? options.capture_radius_cm : walk_step;
  const double radius = calib.turn_radius_cm;

  Pose pose{waypoints[0].x_cm, waypoints[0].y_cm, options.initial_heading_rad};
  ScheduleBuilder builder(options);
  std::size_t cycles = 0;
  std::size_t target = 1;

  while (target < waypoints.size()) {
    const Point& wp = waypoints[target];
    const double dx = wp.x_cm - pose.x_cm;
    const double dy = wp.y_cm - pose.y_cm;
    const double dist = std::hypot(dx, dy);
    if (dist <= capture) {
      ++target;
      continue;
    }
    const double error = wrap_angle(std::atan2(dy, dx) - pose.heading_rad);
    const double tolerance =
        0.5 * (error > 0.0 ? calib.dtheta_left_rad : calib.dtheta_right_rad);

    GaitMode mode = GaitMode::kWalk;
    if (std::abs(error) > tolerance) {
      // Centre of the arc the robot would turn on.
      const double side = error > 0.0 ? 1.0 : -1.0;
      const double cx = pose.x_cm - side * radius * std::sin(pose.heading_rad);
      const double cy = pose.y_cm + side * radius * std::cos(pose.heading_rad);
      if (std::hypot(wp.x_cm - cx, wp.y_cm - cy) < radius) {
        if (target == 1 && cycles == 0) {
          throw PlanningError(describe(target, wp) +
                                  " lies inside the turning circle at the start",
                              target);
        }
        // Overshot a corner; looping back would only orbit it.
        ++target;
        continue;
      }
      mode = error > 0.0 ? GaitMode::kTurnLeft : GaitMode::kTurnRight;
    }

    pose = step(pose, mode, 2, calib);
    builder.add_cycle(mode);
    if (++cycles > options.max_cycles) {
      throw PlanningError(describe(target, wp) + " not reached within " +
                              std::to_string(options.max_cycles) + " cycles",
                          target);
    }
  }

  PathPlan plan;
  plan.schedule = builder.finish();
  plan.trajectory =
      simulate(plan.schedule, calib, options.dt_s,
               {waypoints[0].x_cm, waypoints[0].y_cm, options.initial_heading_rad});
  return plan;
}

}  // namespace bests::locomotion
