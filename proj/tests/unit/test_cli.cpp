#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "bests/errors.hpp"
#include "bests_sim/commands.hpp"
#include "bests_sim/config.hpp"
#include "json.hpp"

using namespace bests;
using namespace bests::sim;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

json default_doc() { return json::parse(read_file(BESTS_DEFAULT_CONFIG)); }

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t col(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw std::out_of_range("no column " + name);
  }
  double num(std::size_t row, const std::string& name) const {
    return std::stod(rows.at(row).at(col(name)));
  }
};

Csv read_csv(const fs::path& p) {
  Csv csv;
  std::istringstream in(read_file(p));
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (first) {
      csv.header = cells;
      first = false;
    } else {
      csv.rows.push_back(cells);
    }
  }
  return csv;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("bests_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    unsetenv(kOutDirEnv);
  }
  void TearDown() override {
    unsetenv(kOutDirEnv);
    fs::remove_all(dir_);
  }

  fs::path write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p, std::ios::binary) << text;
    return p;
  }

  RunReport run(const std::string& command, const json& doc,
                std::optional<std::string> schedule = std::nullopt,
                std::optional<double> dt = std::nullopt, const std::string& sub = "out") {
    CommandRequest req;
    req.command = command;
    req.out_dir = dir_ / sub;
    req.schedule = std::move(schedule);
    req.dt_s = dt;
    return run_command(parse_config(doc.dump()), req);
  }

  fs::path dir_;
};

std::string field_of(const json& doc) {
  try {
    parse_config(doc.dump());
  } catch (const ValidationError& e) {
    return e.field();
  }
  return "<no error>";
}

}  // namespace

TEST_F(CliTest, DefaultConfigLoads) {
  const RobotConfig cfg = load_config(BESTS_DEFAULT_CONFIG);
  EXPECT_EQ(cfg.robot.system_a.outputs.size() + cfg.robot.system_b.outputs.size(), 10u);
  EXPECT_EQ(cfg.robot.system_a.v_total_ml, 600.0);
  EXPECT_EQ(cfg.robot.system_b.v_total_ml, 600.0);
  // Hash is over the canonical document, not the file's formatting.
  EXPECT_EQ(cfg.hash, parse_config(default_doc().dump()).hash);
  EXPECT_EQ(cfg.hash, parse_config(default_doc().dump(8)).hash);
  auto changed = default_doc();
  changed["dt_s"] = 0.2;
  EXPECT_NE(cfg.hash, parse_config(changed.dump()).hash);
}

TEST_F(CliTest, VolumeDefaultsToSixHundred) {
  auto doc = default_doc();
  doc["systems"]["A"].erase("v_total_ml");
  EXPECT_EQ(parse_config(doc.dump()).robot.system_a.v_total_ml, 600.0);
}

TEST_F(CliTest, LegStructureIsEnforced) {
  auto doc = default_doc();
  doc["systems"]["B"]["outputs"][1]["size_class"] = "large";
  EXPECT_EQ(field_of(doc), "systems.B.outputs");
  doc = default_doc();
  doc["systems"]["A"]["outputs"].erase(0);
  EXPECT_EQ(field_of(doc), "systems.A.outputs");
  doc = default_doc();
  doc["systems"]["B"]["outputs"][0]["id"] = "a1";
  EXPECT_EQ(field_of(doc), "systems");
}

TEST_F(CliTest, ValidationNamesTheField) {
  auto doc = default_doc();
  doc["calibration_targets"].erase("speed_cm_s");
  EXPECT_EQ(field_of(doc), "calibration_targets.speed_cm_s");
  doc = default_doc();
  doc["calibration_targets"]["walk_period_s"] = -1.0;
  EXPECT_EQ(field_of(doc), "calibration_targets.walk_period_s");
  doc = default_doc();
  doc["systems"]["A"]["outputs"][2]["radius_mm"] = "big";
  EXPECT_EQ(field_of(doc), "systems.A.outputs[2].radius_mm");
  doc = default_doc();
  doc["systems"]["A"]["outputs"][2]["beta"] = 1.0;
  EXPECT_EQ(field_of(doc), "systems.A.outputs[2]");
  doc = default_doc();
  doc["systems"]["A"]["outputs"][0]["size_class"] = "medium";
  EXPECT_EQ(field_of(doc), "systems.A.outputs[0].size_class");
  doc = default_doc();
  doc["belt"]["gear_ratoi"] = 1.0;
  EXPECT_EQ(field_of(doc), "belt.gear_ratoi");
  doc = default_doc();
  doc.erase("systems");
  EXPECT_EQ(field_of(doc), "systems");
  EXPECT_THROW(parse_config("{ not json"), ValidationError);
  EXPECT_THROW(load_config(dir_ / "missing.json"), ValidationError);
}

TEST_F(CliTest, OutputDirectoryPrecedence) {
  auto doc = default_doc();
  doc["output_dir"] = (dir_ / "from_config").string();
  const RobotConfig cfg = parse_config(doc.dump());
  CommandRequest req;
  EXPECT_EQ(resolve_out_dir(req, cfg), dir_ / "from_config");
  setenv(kOutDirEnv, (dir_ / "from_env").c_str(), 1);
  EXPECT_EQ(resolve_out_dir(req, cfg), dir_ / "from_env");
  req.out_dir = dir_ / "from_flag";
  EXPECT_EQ(resolve_out_dir(req, cfg), dir_ / "from_flag");
}

TEST_F(CliTest, CharacterizeCurves) {
  const auto report = run("characterize", default_doc());
  const Csv csv = read_csv(report.out_dir / "characterize.csv");
  EXPECT_EQ(csv.header.front(), "rho_per_mm");
  ASSERT_EQ(csv.rows.size(), 121u);
  EXPECT_EQ(csv.num(0, "large_bend_rad"), 0.0);
  EXPECT_EQ(csv.num(0, "small_bend_rad"), 0.0);
  std::size_t large_sat = csv.rows.size();
  std::size_t small_sat = csv.rows.size();
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    if (i > 0) {
      EXPECT_GE(csv.num(i, "large_bend_rad"), csv.num(i - 1, "large_bend_rad"));
      EXPECT_GE(csv.num(i, "small_bend_rad"), csv.num(i - 1, "small_bend_rad"));
      EXPECT_GT(csv.num(i, "large_bend_rad"), csv.num(i, "small_bend_rad"));
    }
    if (csv.num(i, "large_saturated") == 1.0 && large_sat == csv.rows.size()) large_sat = i;
    if (csv.num(i, "small_saturated") == 1.0 && small_sat == csv.rows.size()) small_sat = i;
  }
  EXPECT_LT(large_sat, small_sat);
  EXPECT_TRUE(fs::exists(report.out_dir / "characterize.svg"));
}

TEST_F(CliTest, CharacterizeSinglePoint) {
  auto doc = default_doc();
  doc["characterize"] = {{"rho_min_per_mm", 0.01}, {"rho_max_per_mm", 0.01}, {"points", 1}};
  const auto report = run("characterize", doc);
  EXPECT_EQ(read_csv(report.out_dir / "characterize.csv").rows.size(), 1u);
}

TEST_F(CliTest, TwistSweepOrderedByVolume) {
  const auto report = run("twist-sweep", default_doc());
  const Csv csv = read_csv(report.out_dir / "twist_sweep.csv");
  ASSERT_EQ(csv.rows.size(), 3u * 61u);
  for (std::size_t i = 0; i < 61; ++i) {
    const double b200 = csv.num(i, "a1_bend_rad");
    const double b300 = csv.num(61 + i, "a1_bend_rad");
    const double b400 = csv.num(122 + i, "a1_bend_rad");
    EXPECT_EQ(csv.num(i, "alpha_rad"), csv.num(61 + i, "alpha_rad"));
    if (i == 0) {
      EXPECT_EQ(b200, 0.0);
      EXPECT_EQ(b400, 0.0);
    } else {
      EXPECT_LT(b200, b300);
      EXPECT_LT(b300, b400);
    }
  }
}

TEST_F(CliTest, TwistSweepRibs) {
  auto six = default_doc();
  auto four = default_doc();
  four["systems"]["A"]["input"]["ribs"] = 4;
  const Csv c6 = read_csv(run("twist-sweep", six, {}, {}, "six").out_dir / "twist_sweep.csv");
  const Csv c4 = read_csv(run("twist-sweep", four, {}, {}, "four").out_dir / "twist_sweep.csv");
  for (std::size_t i = 0; i < c6.rows.size(); ++i) {
    EXPECT_GE(c6.num(i, "a1_bend_rad"), c4.num(i, "a1_bend_rad"));
  }
}

TEST_F(CliTest, TwistSweepReportsOverflowAndContinues) {
  auto doc = default_doc();
  doc["systems"]["A"]["input"]["gain_base"] = 0.5;
  doc["twist_sweep"] = {{"volumes_ml", {3000}}, {"points", 11}};
  const Csv csv = read_csv(run("twist-sweep", doc).out_dir / "twist_sweep.csv");
  ASSERT_EQ(csv.rows.size(), 11u);
  EXPECT_EQ(csv.num(10, "saturated"), 1.0);
  EXPECT_GT(csv.num(10, "overflow_ml"), 0.0);
  EXPECT_EQ(csv.num(0, "saturated"), 0.0);
}

TEST_F(CliTest, GaitOneCycleHundredRows) {
  auto doc = default_doc();
  const fs::path sched =
      write("one.json", R"({"segments": [{"mode": "walk", "period_s": 2.8, "cycles": 1}]})");
  const auto report = run("gait", doc, sched.string(), 0.028);
  EXPECT_EQ(read_csv(report.out_dir / "gait_timeline.csv").rows.size(), 100u);
}

TEST_F(CliTest, GaitWalkGroupsNeverOverlap) {
  const auto report = run("gait", default_doc(), "walk", 0.014);
  const Csv csv = read_csv(report.out_dir / "gait_timeline.csv");
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    EXPECT_NE(csv.num(i, "a1_stance"), csv.num(i, "b1_stance"));
    // The forward sweep ends exactly on the right-open walk boundary.
    const double phase = csv.num(i, "phase_rad");
    EXPECT_EQ(csv.rows[i][csv.col("mode")], phase < 2.0 * kPi / 3.0 ? "walk" : "turn-left");
    EXPECT_LE(phase, 2.0 * kPi / 3.0 + 1e-12);
  }
  EXPECT_TRUE(fs::exists(report.out_dir / "gait_bars.svg"));
}

TEST_F(CliTest, GaitTurnLeftSmallLegsTouchDown) {
  const auto report = run("gait", default_doc(), "turn-left", 0.1);
  const Csv csv = read_csv(report.out_dir / "gait_timeline.csv");
  int small_contacts = 0;
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    if (csv.num(i, "b2_contact") == 1.0) {
      ++small_contacts;
      EXPECT_EQ(csv.rows[i][csv.col("mode")], "turn-left");
    }
  }
  EXPECT_GT(small_contacts, 0);
}

TEST_F(CliTest, SimulateWalk) {
  const auto report = run("simulate", default_doc(), "walk");
  const Csv csv = read_csv(report.out_dir / "trajectory.csv");
  EXPECT_EQ(csv.header, (std::vector<std::string>{"t_s", "x_cm", "y_cm", "heading_rad",
                                                  "heading_deg", "mode"}));
  const std::size_t last = csv.rows.size() - 1;
  EXPECT_NEAR(csv.num(last, "t_s"), 22.4, 1e-12);
  EXPECT_NEAR(std::hypot(csv.num(last, "x_cm"), csv.num(last, "y_cm")), 8.0 * 4.9, 1e-9);
}

TEST_F(CliTest, SimulateOClosesAFullTurn) {
  const auto report = run("simulate", default_doc(), "o");
  const Csv csv = read_csv(report.out_dir / "trajectory.csv");
  const std::size_t last = csv.rows.size() - 1;
  EXPECT_NEAR(std::abs(csv.num(last, "heading_deg")), 360.0, 5.0);
  EXPECT_LT(std::hypot(csv.num(last, "x_cm"), csv.num(last, "y_cm")), 15.0);
  EXPECT_TRUE(fs::exists(report.out_dir / "heading.svg"));
  EXPECT_TRUE(fs::exists(report.out_dir / "path.svg"));
}

TEST_F(CliTest, SimulateEmptySchedule) {
  const fs::path sched = write("empty.json", R"({"segments": []})");
  const auto report = run("simulate", default_doc(), sched.string());
  EXPECT_EQ(read_csv(report.out_dir / "trajectory.csv").rows.size(), 1u);
}

TEST_F(CliTest, ScheduleFileErrors) {
  const RobotConfig cfg = load_config(BESTS_DEFAULT_CONFIG);
  try {
    parse_schedule(R"({"segments": [{"mode": "walk"}]})", cfg);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), "schedule.segments[0].cycles");
  }
  EXPECT_THROW(parse_schedule(R"({"segments": [{"mode": "hop", "cycles": 1}]})", cfg),
               ValidationError);
  EXPECT_THROW(parse_schedule(R"({"segments": [{"phase_lo_rad": 2, "phase_hi_rad": 1,
                                                "cycles": 1}]})",
                              cfg),
               ValidationError);
  EXPECT_THROW(resolve_schedule((dir_ / "nope.json").string(), cfg, 0.1), ValidationError);

  const auto r = parse_schedule(
      R"({"segments": [{"phase_lo_rad": 0, "phase_hi_rad": 1, "period_s": 2,
                         "cycles": 3, "direction": "reverse"}]})",
      cfg);
  ASSERT_EQ(r.schedule.segments.size(), 1u);
  EXPECT_EQ(r.schedule.segments[0].direction, gait::SweepDirection::kReverse);
  EXPECT_EQ(r.schedule.duration(), 6.0);
}

TEST_F(CliTest, WaypointScheduleFile) {
  const fs::path sched = write("line.json", R"({"waypoints": [[0, 0], [40, 0]]})");
  const auto report = run("simulate", default_doc(), sched.string());
  const Csv segs = read_csv(report.out_dir / "schedule.csv");
  for (std::size_t i = 0; i < segs.rows.size(); ++i) {
    EXPECT_EQ(segs.rows[i][segs.col("mode")], "walk");
  }
}

TEST_F(CliTest, CalibrateWritesConfigBlock) {
  const auto report = run("calibrate", default_doc());
  const json block = json::parse(read_file(report.out_dir / "calibration.json"));
  const auto& c = block.at("calibration");
  EXPECT_DOUBLE_EQ(c.at("stride_walk_cm").get<double>(), 1.75 * 2.8);
  EXPECT_NEAR(c.at("dtheta_left_rad").get<double>(), 0.1164, 5e-5);
  EXPECT_NEAR(c.at("dtheta_right_rad").get<double>(), 0.1240, 5e-5);

  // The block drops straight back into a config.
  auto doc = default_doc();
  doc["calibration"] = c;
  const RobotConfig cfg = parse_config(doc.dump());
  ASSERT_TRUE(cfg.calibration.has_value());
  EXPECT_EQ(cfg.calibration->stride_walk_cm, c.at("stride_walk_cm").get<double>());

  const Csv rt = read_csv(report.out_dir / "calibration_roundtrip.csv");
  ASSERT_EQ(rt.rows.size(), 4u);
  for (std::size_t i = 0; i < rt.rows.size(); ++i) {
    EXPECT_LT(rt.num(i, "relative_error"), 0.01) << rt.rows[i][0];
  }
}

TEST_F(CliTest, ReportListsEveryFile) {
  const auto report = run("simulate", default_doc(), "s");
  const json j = json::parse(read_file(report.out_dir / "run_report.json"));
  EXPECT_EQ(j.at("command"), "simulate");
  EXPECT_EQ(j.at("schedule"), "s");
  std::set<std::string> listed;
  for (const auto& f : j.at("files")) listed.insert(f.at("file").get<std::string>());
  for (const auto& entry : fs::directory_iterator(report.out_dir)) {
    const std::string name = entry.path().filename().string();
    if (name != "run_report.json") EXPECT_TRUE(listed.count(name)) << name;
  }
  EXPECT_EQ(listed.size(), 4u);
}

TEST_F(CliTest, EveryCsvHasHeaderAndEverySvgIsWellFormed) {
  for (const auto& cmd : command_names()) {
    const auto report = run(cmd, default_doc(), {}, {}, cmd);
    for (const auto& f : report.files) {
      const std::string text = read_file(report.out_dir / f.file);
      if (f.file.ends_with(".csv")) {
        const Csv csv = read_csv(report.out_dir / f.file);
        EXPECT_FALSE(csv.header.empty());
        for (const auto& row : csv.rows) EXPECT_EQ(row.size(), csv.header.size()) << f.file;
      } else if (f.file.ends_with(".svg")) {
        EXPECT_EQ(text.rfind("<?xml", 0), 0u);
        EXPECT_NE(text.find("<svg xmlns=\"http://www.w3.org/2000/svg\""), std::string::npos);
        EXPECT_TRUE(text.ends_with("</svg>\n"));
      }
    }
  }
}

TEST_F(CliTest, RepeatedRunsAreByteIdentical) {
  for (const auto& cmd : command_names()) {
    const auto a = run(cmd, default_doc(), "o", {}, cmd + "_1");
    const auto b = run(cmd, default_doc(), "o", {}, cmd + "_2");
    ASSERT_EQ(a.files.size(), b.files.size());
    for (std::size_t i = 0; i < a.files.size(); ++i) {
      EXPECT_EQ(read_file(a.out_dir / a.files[i].file), read_file(b.out_dir / b.files[i].file))
          << cmd << " " << a.files[i].file;
    }
  }
}

TEST_F(CliTest, ExitCodes) {
  const std::string exe = BESTS_SIM_EXE;
  auto status = [&](const std::string& args) {
    const std::string cmd = exe + " " + args + " > /dev/null 2>&1";
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  const std::string out = " --out " + (dir_ / "exe").string();
  EXPECT_EQ(status(std::string("calibrate --config ") + BESTS_DEFAULT_CONFIG + out), 0);

  auto bad = default_doc();
  bad["systems"]["A"]["outputs"].erase(4);
  const fs::path bad_cfg = write("bad.json", bad.dump());
  EXPECT_EQ(status("gait --config " + bad_cfg.string() + out), kExitConfigError);
  EXPECT_EQ(status("gait --config " + (dir_ / "absent.json").string() + out), kExitConfigError);

  const fs::path tight = write("tight.json", R"({"waypoints": [[0,0],[20,0],[20,10],[40,10]]})");
  EXPECT_EQ(status(std::string("simulate --config ") + BESTS_DEFAULT_CONFIG + out +
                   " --schedule " + tight.string()),
            kExitSolverError);

  auto starved = default_doc();
  starved["systems"]["A"]["input"]["v_rest_ml"] = 700.0;
  const fs::path starved_cfg = write("starved.json", starved.dump());
  EXPECT_EQ(status("gait --config " + starved_cfg.string() + out), kExitSolverError);

  EXPECT_NE(status(std::string("fly --config ") + BESTS_DEFAULT_CONFIG), 0);
}

TEST_F(CliTest, EnvironmentOverridesConfigDirectory) {
  setenv(kOutDirEnv, (dir_ / "env_out").c_str(), 1);
  CommandRequest req;
  req.command = "characterize";
  req.config_path = BESTS_DEFAULT_CONFIG;
  std::ostringstream out;
  std::ostringstream err;
  EXPECT_EQ(run_cli(req, out, err), kExitOk) << err.str();
  EXPECT_TRUE(fs::exists(dir_ / "env_out" / "characterize.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "env_out" / "run_report.json"));
}
