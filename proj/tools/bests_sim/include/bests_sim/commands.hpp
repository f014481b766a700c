#pragma once

// The five bests-sim commands. Each one reads a RobotConfig, writes CSV and
// SVG artifacts into the output directory and returns a RunReport, which is
// also written there as run_report.json.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bests/gait.hpp"
#include "bests/locomotion.hpp"
#include "bests_sim/config.hpp"
#include "bests_sim/output.hpp"

namespace bests::sim {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfigError = 2,
  kExitSolverError = 3,
};

inline constexpr const char* kOutDirEnv = "BESTS_SIM_OUT_DIR";

struct CommandRequest {
  std::string command;  // characterize | twist-sweep | gait | simulate | calibrate
  std::filesystem::path config_path;
  std::optional<std::filesystem::path> out_dir;
  std::optional<double> dt_s;
  std::optional<std::string> schedule;  // built-in name or JSON file
};

struct RunReport {
  std::string command;
  std::string schedule;
  std::uint64_t config_hash = 0;
  std::filesystem::path out_dir;
  std::vector<ManifestEntry> files;
  double wall_time_s = 0.0;
};

const std::vector<std::string>& command_names();
const std::vector<std::string>& builtin_schedule_names();

// --out, then $BESTS_SIM_OUT_DIR, then the config's output_dir.
std::filesystem::path resolve_out_dir(const CommandRequest& req, const RobotConfig& cfg);

struct ResolvedSchedule {
  std::string name;
  gait::ServoSchedule schedule;
  std::vector<locomotion::Point> waypoints;  // empty unless path-following
  double initial_heading_rad = 0.0;
};

// Schedule file format:
//   {"segments": [{"mode": "walk", "period_s": 2.8, "cycles": 8}, ...]}
// where a segment gives either "mode" (walk | turn-left | turn-right) or an
// explicit "phase_lo_rad"/"phase_hi_rad" pair, plus optional "direction"
// (forward | reverse); or
//   {"waypoints": [[x_cm, y_cm], ...], "initial_heading_rad": 0}
// for path following.
ResolvedSchedule parse_schedule(const std::string& json_text, const RobotConfig& cfg);

// Built-in names: walk, turn-left, turn-right, s, o. Anything else is read
// as a schedule file.
ResolvedSchedule resolve_schedule(const std::string& name_or_file,
                                  const RobotConfig& cfg, double dt_s);

struct CalibrationCheck {
  std::string quantity;
  std::string unit;
  double target;
  double simulated;
  double relative_error;
};

// Simulates the calibration back against the targets it came from.
std::vector<CalibrationCheck> calibration_round_trip(
    const locomotion::Calibration& calib,
    const locomotion::CalibrationTargets& targets, double dt_s);

// Throws on any error; see run_cli for the exit-code mapping.
RunReport run_command(const RobotConfig& cfg, const CommandRequest& req);

std::string report_json(const RunReport& report);

// Loads the config, runs the command and maps failures to exit codes:
// ValidationError -> 2, DomainError / SaturationError / PlanningError -> 3.
int run_cli(const CommandRequest& req, std::ostream& out, std::ostream& err);

}  // namespace bests::sim
