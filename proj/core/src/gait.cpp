#include "bests/gait.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "bests/errors.hpp"

namespace bests::gait {

using transmission::Group;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double phase_within_segment(const ServoSegment& seg, double tau) {
  double sweep_index = 0.0;
  double frac = 0.0;
  if (tau >= seg.duration()) {
    sweep_index = std::ceil(seg.cycles) - 1.0;
    frac = seg.cycles - sweep_index;
  } else {
    const double u = tau / seg.period_s;
    sweep_index = std::floor(u);
    frac = u - sweep_index;
  }
  const bool even = std::fmod(sweep_index, 2.0) == 0.0;
  const bool forward = even == (seg.direction == SweepDirection::kForward);
  const double span = seg.phase_hi - seg.phase_lo;
  return forward ? seg.phase_lo + span * frac : seg.phase_hi - span * frac;
}

}  // namespace

const char* to_string(GaitMode mode) {
  switch (mode) {
    case GaitMode::kWalk:
      return "walk";
    case GaitMode::kTurnLeft:
      return "turn-left";
    case GaitMode::kTurnRight:
      return "turn-right";
  }
  return "?";
}

const char* to_string(SweepDirection direction) {
  return direction == SweepDirection::kForward ? "forward" : "reverse";
}

const char* to_string(PhaseRole role) {
  return role == PhaseRole::kStance ? "stance" : "swing";
}

double normalize_phase(double phase) {
  if (phase >= 0.0 && phase < kTwoPi) return phase;
  double p = std::fmod(phase, kTwoPi);
  if (p < 0.0) p += kTwoPi;
  if (p >= kTwoPi) p = 0.0;
  return p;
}

GaitMode mode_of_phase(double phase) {
  const double p = normalize_phase(phase);
  if (p < kWalkPhaseHi) return GaitMode::kWalk;
  if (p < kTurnSplitPhase) return GaitMode::kTurnLeft;
  if (p < kTurnRightPhaseHi) return GaitMode::kTurnRight;
  return GaitMode::kWalk;
}

double ServoSegment::start_phase() const {
  return direction == SweepDirection::kForward ? phase_lo : phase_hi;
}

double ServoSegment::end_phase() const {
  return phase_within_segment(*this, duration());
}

void ServoSegment::validate() const {
  if (!(phase_lo >= 0.0 && phase_hi <= kTwoPi && phase_lo <= phase_hi)) {
    throw ValidationError("phase_lo_rad",
                          "phase interval must satisfy 0 <= lo <= hi <= 2pi");
  }
  if (!(period_s > 0.0)) {
    throw ValidationError("period_s", "sweep period must be positive");
  }
  if (!(cycles >= 0.0) || !std::isfinite(cycles)) {
    throw ValidationError("cycles", "cycle count must be >= 0");
  }
}

double ServoSchedule::duration() const {
  double total = 0.0;
  for (const auto& seg : segments) total += seg.duration();
  return total;
}

void ServoSchedule::validate() const {
  for (std::size_t i = 0; i < segments.size(); ++i) {
    try {
      segments[i].validate();
    } catch (const ValidationError& e) {
      throw ValidationError(
          "segments[" + std::to_string(i) + "]." + e.field(), e.message());
    }
  }
}

ServoSegment walk_segment(double period_s, double cycles) {
  return {0.0, kWalkPhaseHi, period_s, cycles, SweepDirection::kForward};
}

ServoSegment turn_left_segment(double period_s, double cycles) {
  return {kWalkPhaseHi, kTurnSplitPhase, period_s, cycles,
          SweepDirection::kForward};
}

ServoSegment turn_right_segment(double period_s, double cycles) {
  return {kTurnSplitPhase, kTurnRightPhaseHi, period_s, cycles,
          SweepDirection::kForward};
}

double servo_phase(const ServoSchedule& schedule, double t) {
  if (schedule.segments.empty()) return 0.0;
  if (!(t > 0.0)) return schedule.segments.front().start_phase();
  double elapsed = 0.0;
  for (std::size_t i = 0; i < schedule.segments.size(); ++i) {
    const ServoSegment& seg = schedule.segments[i];
    const double d = seg.duration();
    const bool last = i + 1 == schedule.segments.size();
    if (t < elapsed + d || last) {
      return phase_within_segment(seg, std::min(t - elapsed, d));
    }
    elapsed += d;
  }
  return schedule.segments.back().end_phase();
}

GaitSnapshot leg_contact_states(const transmission::LegBendProfile& profile,
                                double phase,
                                const GaitThresholds& thresholds) {
  GaitSnapshot snap;
  snap.phase = normalize_phase(phase);
  snap.mode = mode_of_phase(phase);
  snap.active = profile.eta_b > profile.eta_a ? Group::kB : Group::kA;
  snap.legs.reserve(profile.legs.size());
  for (const auto& leg : profile.legs) {
    const bool stance = leg.group == snap.active;
    bool contact = stance;
    if (leg.size_class == geometry::SizeClass::kSmall) {
      contact = stance && leg.bend >= thresholds.small_contact_bend_rad;
    }
    snap.legs.push_back({leg.id, leg.group, leg.size_class,
                         stance ? PhaseRole::kStance : PhaseRole::kSwing,
                         contact, leg.bend});
  }
  return snap;
}

void Robot::validate() const {
  belt.validate();
  system_a.validate();
  system_b.validate();
  if (!(thresholds.small_contact_bend_rad > 0.0)) {
    throw DomainError("small-leg contact threshold must be positive");
  }
}

transmission::Equilibrium solve_equilibrium_clamped(
    const transmission::ClosedSystem& sys, double alpha) {
  try {
    return transmission::solve_equilibrium(sys, alpha);
  } catch (const SaturationError&) {
    const double v_in = transmission::input_volume(sys.input, alpha);
    const double v_out = sys.max_output_volume_ml();
    return {alpha,
            sys.max_saturation_curvature(),
            transmission::shrinkage_rate(sys.input, alpha),
            v_in,
            v_out,
            v_in + v_out - sys.v_total_ml};
  }
}

GaitSnapshot gait_snapshot(const Robot& robot, double servo) {
  const double alpha_a = robot.belt.twist_fraction(Group::kA, servo) *
                         robot.system_a.input.alpha_max_rad;
  const double alpha_b = robot.belt.twist_fraction(Group::kB, servo) *
                         robot.system_b.input.alpha_max_rad;
  const transmission::CoupledState state{
      servo, solve_equilibrium_clamped(robot.system_a, alpha_a),
      solve_equilibrium_clamped(robot.system_b, alpha_b)};
  return leg_contact_states(
      transmission::leg_bend_profile(robot.system_a, robot.system_b, state),
      servo, robot.thresholds);
}

std::size_t timeline_sample_count(double duration, double dt) {
  if (!(duration > 0.0)) return 1;
  return static_cast<std::size_t>(std::ceil(duration / dt - 1e-9));
}

std::vector<TimelineSample> gait_timeline(const Robot& robot,
                                          const ServoSchedule& schedule,
                                          double dt) {
  if (!(dt > 0.0)) throw ValidationError("dt", "time step must be positive");
  const std::size_t n = timeline_sample_count(schedule.duration(), dt);
  std::vector<TimelineSample> samples;
  samples.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * dt;
    samples.push_back({t, gait_snapshot(robot, servo_phase(schedule, t))});
  }
  return samples;
}

}  // namespace bests::gait
