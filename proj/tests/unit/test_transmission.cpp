#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "bests/errors.hpp"
#include "bests/transmission.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace bests;
using namespace bests::transmission;
using geometry::SizeClass;

namespace {

constexpr double kPi = std::numbers::pi;

// Conservation residual computed from first principles: power-law input
// plus circular-segment outputs, capped at each unit's fold angle.
double residual_oracle(const ClosedSystem& sys, double alpha, double rho) {
  const auto& in = sys.input;
  const double gain = std::min(1.0, in.gain_base + in.gain_per_rib * in.ribs);
  const double v_in = std::max(
      0.0, in.v_rest_ml * (1.0 - std::pow(alpha / in.alpha_max_rad, in.squeeze_exponent) * gain));
  long double v_out = 0.0L;
  for (const auto& u : sys.outputs) {
    const double s1 = u.segment.arc_length();
    const double theta = std::min(s1 * rho / 2.0, u.segment.theta_cap());
    v_out += u.n_segments * oracle::arc_segment_area(s1, theta) * u.segment.depth() / 1000.0L +
             u.v_flat_ml;
  }
  return static_cast<double>(v_in + v_out - sys.v_total_ml);
}

}  // namespace

TEST(InputVolume, Examples) {
  InputUnit in;
  in.v_rest_ml = 500.0;
  EXPECT_EQ(input_volume(in, 0.0), 500.0);

  InputUnit six = in;
  six.ribs = 6;
  InputUnit four = in;
  four.ribs = 4;
  for (double a = 0.1; a < in.alpha_max_rad; a += 0.1) {
    EXPECT_LT(input_volume(six, a), input_volume(four, a));
  }

  InputUnit full = in;
  full.gain_base = 1.0;
  full.gain_per_rib = 0.0;
  full.squeeze_exponent = 1.0;
  EXPECT_EQ(full.rib_gain(), 1.0);
  EXPECT_EQ(input_volume(full, full.alpha_max_rad), 0.0);
}

TEST(InputVolume, DomainAndMonotonicity) {
  InputUnit in;
  EXPECT_THROW(input_volume(in, -1e-12), DomainError);
  EXPECT_THROW(input_volume(in, in.alpha_max_rad * (1.0 + 1e-12)), DomainError);
  double prev = input_volume(in, 0.0);
  for (int i = 1; i <= 1000; ++i) {
    const double v = input_volume(in, in.alpha_max_rad * i / 1000.0);
    EXPECT_LT(v, prev);
    prev = v;
  }
  InputUnit more = in;
  more.ribs = in.ribs + 1;
  EXPECT_GT(more.rib_gain(), in.rib_gain());
  EXPECT_DOUBLE_EQ(shrinkage_rate(in, 0.0), 0.0);
}

TEST(Equilibrium, RestBalancesToZero) {
  const auto sys = fixtures::system("a");
  const auto eq = solve_equilibrium(sys, 0.0);
  EXPECT_EQ(eq.rho, 0.0);
  EXPECT_EQ(eq.eta, 0.0);
}

TEST(Equilibrium, ConservationHoldsEverywhere) {
  for (double v_total : {200.0, 300.0, 400.0, 600.0}) {
    for (int ribs : {4, 6}) {
      const auto sys = fixtures::system("a", v_total, ribs);
      for (int i = 0; i <= 200; ++i) {
        const auto eq = solve_equilibrium(sys, sys.input.alpha_max_rad * i / 200.0);
        EXPECT_LT(std::abs(eq.v_in_ml + eq.v_out_ml - v_total), 1e-9 * v_total);
        EXPECT_EQ(eq.residual_ml, eq.v_in_ml + eq.v_out_ml - v_total);
      }
    }
  }
}

TEST(Equilibrium, ThreeHundredMillilitresAtHalfTwistMatchesGridScan) {
  const auto sys = fixtures::system("a", 300.0);
  const double alpha = sys.input.alpha_max_rad / 2.0;
  const auto eq = solve_equilibrium(sys, alpha);

  double rho_hi = 0.0;
  for (const auto& u : sys.outputs) {
    rho_hi = std::max(rho_hi, 2.0 * u.segment.theta_cap() / u.segment.arc_length());
  }
  const auto bracket = oracle::sign_change_bracket(
      [&](double rho) { return residual_oracle(sys, alpha, rho); }, 0.0, rho_hi, 100000);
  ASSERT_TRUE(bracket.has_value());
  EXPECT_GE(eq.rho, bracket->first);
  EXPECT_LE(eq.rho, bracket->second);
  EXPECT_GT(eq.rho, 0.0);
}

TEST(Equilibrium, MonotoneInTwist) {
  const auto sys = fixtures::system("a");
  double prev = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    const double rho = solve_equilibrium(sys, sys.input.alpha_max_rad * i / 2000.0).rho;
    EXPECT_GE(rho, prev);
    prev = rho;
  }
}

TEST(Equilibrium, RibsSixDominateFour) {
  const auto six = fixtures::system("a", 600.0, 6);
  const auto four = fixtures::system("a", 600.0, 4);
  const auto& lead = six.outputs.front();
  for (int i = 1; i < 100; ++i) {
    const double alpha = six.input.alpha_max_rad * i / 100.0;
    EXPECT_GE(geometry::unit_bend(lead, solve_equilibrium(six, alpha).rho),
              geometry::unit_bend(lead, solve_equilibrium(four, alpha).rho));
  }
}

TEST(Equilibrium, UnderInflatedIsDomainError) {
  auto sys = fixtures::system("a");
  sys.v_total_ml -= 1.0;
  EXPECT_THROW(solve_equilibrium(sys, 0.0), DomainError);
}

TEST(Equilibrium, OverTwistIsSaturationErrorWithOverflow) {
  auto sys = fixtures::system("a", 3000.0);
  sys.input.gain_base = 0.5;
  const double gain = std::min(1.0, 0.5 + sys.input.gain_per_rib * sys.input.ribs);
  const double expelled = sys.input.v_rest_ml * gain;
  const double room = sys.max_output_volume_ml() - sys.flat_volume_ml();
  ASSERT_GT(expelled, room);
  try {
    solve_equilibrium(sys, sys.input.alpha_max_rad);
    FAIL() << "expected SaturationError";
  } catch (const SaturationError& e) {
    EXPECT_NEAR(e.overflow_ml(), expelled - room, 1e-9 * sys.v_total_ml);
  }
}

TEST(Belt, AntisymmetryIsExact) {
  const auto robot = fixtures::robot();
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> phase(-4.0 * kPi, 4.0 * kPi);
  for (int i = 0; i < 1000; ++i) {
    const double s = phase(rng);
    const auto p = leg_bend_profile(robot.belt, robot.system_a, robot.system_b, s);
    const auto q = leg_bend_profile(robot.belt, robot.system_a, robot.system_b, s + kPi);
    EXPECT_EQ(p.eta_a, q.eta_b);
    EXPECT_EQ(p.eta_b, q.eta_a);
    for (std::size_t j = 0; j < 5; ++j) EXPECT_EQ(p.legs[j].bend, q.legs[j + 5].bend);
  }
}

TEST(Belt, ExtremeStatesAtRestPhase) {
  BeltCoupling belt;
  belt.rest_phase_a = 0.0;
  EXPECT_EQ(belt.twist_fraction(Group::kA, 0.0), 0.0);
  EXPECT_EQ(belt.twist_fraction(Group::kB, 0.0), 1.0);
  EXPECT_EQ(belt.twist_fraction(Group::kA, kPi), 1.0);
  EXPECT_EQ(belt.twist_fraction(Group::kB, kPi), 0.0);
}

TEST(Belt, OppositeSlopes) {
  const auto robot = fixtures::robot();
  const auto& belt = robot.belt;
  for (int i = 0; i < 360; ++i) {
    const double s = 2.0 * kPi * (i + 0.5) / 360.0;
    const double h = 1e-3;
    const double da = belt.twist_fraction(Group::kA, s + h) - belt.twist_fraction(Group::kA, s - h);
    const double db = belt.twist_fraction(Group::kB, s + h) - belt.twist_fraction(Group::kB, s - h);
    if (std::abs(da) > 1e-4 && std::abs(db) > 1e-4) EXPECT_LT(da * db, 0.0);
  }
}

TEST(Belt, GroupsMirrorWhereShrinkageRatesMeet) {
  const auto robot = fixtures::robot();
  // With rest at 5pi/6 both inputs sit at half twist at pi/3 and 4pi/3.
  for (double s : {kPi / 3.0, 4.0 * kPi / 3.0}) {
    const auto p = leg_bend_profile(robot.belt, robot.system_a, robot.system_b, s);
    EXPECT_EQ(p.eta_a, p.eta_b);
    for (std::size_t j = 0; j < 5; ++j) EXPECT_EQ(p.legs[j].bend, p.legs[j + 5].bend);
  }
}

TEST(LegProfile, LargeAheadOfSmallWithinGroup) {
  const auto robot = fixtures::robot();
  for (int i = 0; i < 100; ++i) {
    const double s = 2.0 * kPi * i / 100.0;
    const auto p = leg_bend_profile(robot.belt, robot.system_a, robot.system_b, s);
    for (std::size_t g = 0; g < 2; ++g) {
      const auto* legs = &p.legs[5 * g];
      EXPECT_EQ(legs[0].bend, legs[2].bend);
      EXPECT_EQ(legs[0].bend, legs[4].bend);
      EXPECT_EQ(legs[1].bend, legs[3].bend);
      if (legs[0].bend > 0.0) EXPECT_GT(legs[0].bend, legs[1].bend);
    }
  }
}

TEST(LegProfile, RestStateIsUnbent) {
  const auto robot = fixtures::robot();
  const auto p = leg_bend_profile(robot.belt, robot.system_a, robot.system_b,
                                  robot.belt.rest_phase_a);
  EXPECT_EQ(p.eta_a, 0.0);
  for (std::size_t j = 0; j < 5; ++j) EXPECT_EQ(p.legs[j].bend, 0.0);
  for (std::size_t j = 5; j < 10; ++j) EXPECT_GT(p.legs[j].bend, 0.0);
}

TEST(Belt, ValidateRejects) {
  BeltCoupling belt;
  belt.gear_ratio = 0.0;
  EXPECT_THROW(belt.validate(), DomainError);
  belt.gear_ratio = 1.0;
  belt.ticks_per_rev = 7;
  EXPECT_THROW(belt.validate(), DomainError);
}

TEST(Determinism, RepeatedSolvesAreBitIdentical) {
  const auto sys = fixtures::system("a");
  for (int i = 0; i <= 50; ++i) {
    const double alpha = sys.input.alpha_max_rad * i / 50.0;
    const auto a = solve_equilibrium(sys, alpha);
    const auto b = solve_equilibrium(sys, alpha);
    EXPECT_EQ(a.rho, b.rho);
    EXPECT_EQ(a.v_out_ml, b.v_out_ml);
  }
}
