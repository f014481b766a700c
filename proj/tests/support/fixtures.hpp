#pragma once

// Robot and calibration matching configs/decapod.json, built in code so the
// core tests do not depend on the config loader.

#include <numbers>
#include <string>

#include "bests/gait.hpp"
#include "bests/geometry.hpp"
#include "bests/transmission.hpp"

namespace fixtures {

using namespace bests;

inline geometry::BellowsUnit unit(const std::string& id, geometry::SizeClass size,
                                  double radius_mm, double beta = 0.5,
                                  double depth_mm = 60.0, int n_segments = 4,
                                  double v_flat_ml = 0.5) {
  geometry::BellowsUnit u;
  u.id = id;
  u.size_class = size;
  u.segment = geometry::SegmentGeometry(radius_mm, beta, depth_mm);
  u.n_segments = n_segments;
  u.v_flat_ml = v_flat_ml;
  return u;
}

inline transmission::ClosedSystem system(const std::string& prefix, double v_total_ml = 600.0,
                                         int ribs = 6) {
  using geometry::SizeClass;
  transmission::ClosedSystem sys;
  sys.v_total_ml = v_total_ml;
  sys.input.alpha_max_rad = std::numbers::pi;
  sys.input.ribs = ribs;
  sys.input.squeeze_exponent = 1.2;
  sys.input.gain_base = 0.015;
  sys.input.gain_per_rib = 0.005;
  sys.outputs = {unit(prefix + "1", SizeClass::kLarge, 40.0),
                 unit(prefix + "2", SizeClass::kSmall, 28.0),
                 unit(prefix + "3", SizeClass::kLarge, 40.0),
                 unit(prefix + "4", SizeClass::kSmall, 28.0),
                 unit(prefix + "5", SizeClass::kLarge, 40.0)};
  return transmission::balanced_at_rest(sys);
}

inline gait::Robot robot() {
  gait::Robot r;
  r.belt.rest_phase_a = 5.0 * std::numbers::pi / 6.0;
  r.system_a = system("a");
  r.system_b = system("b");
  return r;
}

}  // namespace fixtures
