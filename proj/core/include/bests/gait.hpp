#pragma once

// Servo phase to gait: the phase->mode map, scripted servo sweeps, and the
// alternating-tripod leg states derived from the two closed systems.

#include <string>
#include <vector>

#include "bests/geometry.hpp"
#include "bests/transmission.hpp"

namespace bests::gait {

enum class GaitMode { kWalk, kTurnLeft, kTurnRight };

const char* to_string(GaitMode mode);

// Maps any angle into [0, 2pi).
double normalize_phase(double phase);

// Walk on [0, 2pi/3) and [4pi/3, 2pi), TurnLeft on [2pi/3, pi),
// TurnRight on [pi, 4pi/3). Intervals are right-open.
GaitMode mode_of_phase(double phase);

inline constexpr double kWalkPhaseHi = 2.0 * 3.141592653589793 / 3.0;
inline constexpr double kTurnSplitPhase = 3.141592653589793;
inline constexpr double kTurnRightPhaseHi = 4.0 * 3.141592653589793 / 3.0;

enum class SweepDirection { kForward, kReverse };

const char* to_string(SweepDirection direction);

// One cycle is a single linear sweep across [phase_lo, phase_hi] taking
// `period_s`. Successive cycles alternate direction, so the servo moves back
// and forth; `direction` sets where the first sweep starts. `cycles` may be
// fractional, in which case the last sweep stops part way.
struct ServoSegment {
  double phase_lo = 0.0;
  double phase_hi = kWalkPhaseHi;
  double period_s = 2.8;
  double cycles = 1.0;
  SweepDirection direction = SweepDirection::kForward;

  double duration() const { return period_s * cycles; }
  double start_phase() const;
  double end_phase() const;
  void validate() const;  // throws ValidationError
};

struct ServoSchedule {
  std::vector<ServoSegment> segments;

  double duration() const;
  void validate() const;
};

ServoSegment walk_segment(double period_s, double cycles);
ServoSegment turn_left_segment(double period_s, double cycles);
ServoSegment turn_right_segment(double period_s, double cycles);

// Piecewise-linear servo phase; holds the final phase past the end and
// returns 0 for an empty schedule.
double servo_phase(const ServoSchedule& schedule, double t);

enum class PhaseRole { kSwing, kStance };

const char* to_string(PhaseRole role);

struct LegState {
  std::string id;
  transmission::Group group;
  geometry::SizeClass size_class;
  PhaseRole role;
  bool in_contact;
  double bend;
};

struct GaitThresholds {
  // Bend a small leg must reach before its tip touches down.
  double small_contact_bend_rad = 1.15;
};

struct GaitSnapshot {
  double phase;
  GaitMode mode;
  transmission::Group active;  // group currently in stance
  std::vector<LegState> legs;  // same order as the bend profile
};

// The group whose input bellows is squeezed harder is in stance, the other
// swings; the two exchange where their shrinkage rates cross. Large legs of
// the stance group touch down at once, small legs only after their bend
// passes the threshold.
GaitSnapshot leg_contact_states(const transmission::LegBendProfile& profile,
                                double phase, const GaitThresholds& thresholds);

struct Robot {
  transmission::BeltCoupling belt;
  transmission::ClosedSystem system_a;
  transmission::ClosedSystem system_b;
  GaitThresholds thresholds;

  void validate() const;
};

// Solves one closed system, holding the outputs fully saturated instead of
// failing when the twist overflows them.
transmission::Equilibrium solve_equilibrium_clamped(
    const transmission::ClosedSystem& sys, double alpha);

GaitSnapshot gait_snapshot(const Robot& robot, double servo);

struct TimelineSample {
  double t;
  GaitSnapshot snapshot;
};

// Samples at t = k * dt for every k with k * dt < duration (one sample at
// t = 0 for an empty schedule). Throws ValidationError for dt <= 0.
std::vector<TimelineSample> gait_timeline(const Robot& robot,
                                          const ServoSchedule& schedule,
                                          double dt);

// Number of samples gait_timeline emits for a schedule of this length.
std::size_t timeline_sample_count(double duration, double dt);

}  // namespace bests::gait
