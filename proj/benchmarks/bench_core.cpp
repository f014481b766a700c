#include <benchmark/benchmark.h>

#include <numbers>

#include "bests/gait.hpp"
#include "bests/geometry.hpp"
#include "bests/locomotion.hpp"
#include "bests/transmission.hpp"
#include "fixtures.hpp"

using namespace bests;

static void BM_UnitBend(benchmark::State& state) {
  const auto unit = fixtures::unit("a1", geometry::SizeClass::kLarge, 40.0);
  double rho = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(geometry::unit_bend(unit, rho));
    rho = rho > 0.15 ? 0.0 : rho + 1e-4;
  }
}
BENCHMARK(BM_UnitBend);

static void BM_SolveEquilibrium(benchmark::State& state) {
  const auto sys = fixtures::system("a");
  double alpha = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(transmission::solve_equilibrium(sys, alpha));
    alpha = alpha > 3.0 ? 0.0 : alpha + 0.01;
  }
}
BENCHMARK(BM_SolveEquilibrium);

static void BM_GaitSnapshot(benchmark::State& state) {
  const auto robot = fixtures::robot();
  double servo = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gait::gait_snapshot(robot, servo));
    servo = servo > 6.2 ? 0.0 : servo + 0.01;
  }
}
BENCHMARK(BM_GaitSnapshot);

static void BM_Simulate(benchmark::State& state) {
  const auto calib = locomotion::calibrate({});
  const gait::ServoSchedule s{{gait::walk_segment(2.8, 8.0), gait::turn_left_segment(4.0, 13.5),
                               gait::turn_right_segment(3.0, 12.0)}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(locomotion::simulate(s, calib, 0.1));
  }
}
BENCHMARK(BM_Simulate)->Unit(benchmark::kMicrosecond);

static void BM_FollowPath(benchmark::State& state) {
  const auto calib = locomotion::calibrate({});
  const auto pts = locomotion::o_curve_waypoints(locomotion::kDefaultOCurveRadiusCm,
                                                 locomotion::kDefaultOCurvePoints);
  for (auto _ : state) {
    benchmark::DoNotOptimize(locomotion::follow_path(pts, calib));
  }
}
BENCHMARK(BM_FollowPath)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
