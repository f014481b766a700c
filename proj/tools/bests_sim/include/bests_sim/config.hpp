#pragma once

// Robot configuration file: JSON with unit-suffixed keys. See README.md for
// the schema. Every loader error is a bests::ValidationError whose field()
// is the dotted path of the offending key.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bests/gait.hpp"
#include "bests/locomotion.hpp"

namespace bests::sim {

struct CharacterizeSettings {
  double rho_min_per_mm = 0.0;
  double rho_max_per_mm = 0.2;
  int points = 121;
};

struct TwistSweepSettings {
  std::vector<double> volumes_ml{200.0, 300.0, 400.0};
  int points = 61;
};

// Waypoint scaling of the built-in S and O paths.
struct PathSettings {
  double s_radius_cm = locomotion::kDefaultSCurveRadiusCm;
  int s_points_per_arc = locomotion::kDefaultSCurvePointsPerArc;
  double o_radius_cm = locomotion::kDefaultOCurveRadiusCm;
  int o_points = locomotion::kDefaultOCurvePoints;
};

struct RobotConfig {
  std::string name = "robot";
  gait::Robot robot;
  locomotion::CalibrationTargets targets;
  std::optional<locomotion::Calibration> calibration;  // overrides targets
  CharacterizeSettings characterize;
  TwistSweepSettings twist_sweep;
  PathSettings paths;
  double dt_s = 0.1;
  std::string output_dir = "out";
  std::uint64_t hash = 0;  // of the canonical JSON text

  // Explicit calibration when present, else calibrate(targets).
  locomotion::Calibration resolved_calibration() const;
};

RobotConfig parse_config(const std::string& json_text);
RobotConfig load_config(const std::filesystem::path& path);

// 64-bit FNV-1a.
std::uint64_t fnv1a64(const std::string& bytes);

// JSON block in config format, as written by the calibrate command.
std::string calibration_json(const locomotion::Calibration& calib);

}  // namespace bests::sim
