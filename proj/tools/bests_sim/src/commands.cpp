#include "bests_sim/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "bests/errors.hpp"
#include "bests/geometry.hpp"
#include "bests/transmission.hpp"
#include "json.hpp"

namespace bests::sim {

using nlohmann::json;
using gait::GaitMode;
using gait::ServoSchedule;
using gait::ServoSegment;
using locomotion::Calibration;
using locomotion::Point;

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

const geometry::BellowsUnit& first_of(const transmission::ClosedSystem& sys,
                                      geometry::SizeClass size) {
  for (const auto& u : sys.outputs) {
    if (u.size_class == size) return u;
  }
  throw ValidationError("systems.A.outputs", "no unit of the requested size class");
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(n));
  if (n == 1) {
    v.push_back(lo);
    return v;
  }
  for (int i = 0; i < n; ++i) {
    v.push_back(i == n - 1 ? hi : lo + (hi - lo) * i / (n - 1));
  }
  return v;
}

void cmd_characterize(const RobotConfig& cfg, ArtifactWriter& out) {
  const auto& large = first_of(cfg.robot.system_a, geometry::SizeClass::kLarge);
  const auto& small = first_of(cfg.robot.system_a, geometry::SizeClass::kSmall);
  const auto& s = cfg.characterize;

  CsvTable csv({"rho_per_mm", "large_bend_rad", "large_saturated", "large_volume_ml",
                "small_bend_rad", "small_saturated", "small_volume_ml"});
  Series sl{"large (" + large.id + ")", {}, {}};
  Series ss{"small (" + small.id + ")", {}, {}};
  for (double rho : linspace(s.rho_min_per_mm, s.rho_max_per_mm, s.points)) {
    const auto bl = geometry::bend_state(large, rho);
    const auto bs = geometry::bend_state(small, rho);
    csv.add(rho).add(bl.unit_bend).add(bl.saturated).add(geometry::unit_volume(large, rho));
    csv.add(bs.unit_bend).add(bs.saturated).add(geometry::unit_volume(small, rho));
    csv.end_row();
    sl.x.push_back(rho);
    sl.y.push_back(bl.unit_bend);
    ss.x.push_back(rho);
    ss.y.push_back(bs.unit_bend);
  }
  out.write("characterize.csv", csv.str());
  out.write("characterize.svg",
            render_svg(LineChart{"Unit bend vs curvature", "curvature rho (1/mm)",
                                 "unit bend (rad)", {sl, ss}, false}));
}

void cmd_twist_sweep(const RobotConfig& cfg, ArtifactWriter& out) {
  const auto& base = cfg.robot.system_a;
  std::vector<std::string> header{"v_total_ml", "alpha_rad", "eta", "rho_per_mm",
                                  "v_in_ml",    "v_out_ml",  "saturated", "overflow_ml"};
  for (const auto& u : base.outputs) header.push_back(u.id + "_bend_rad");
  CsvTable csv(header);

  const auto& lead = first_of(base, geometry::SizeClass::kLarge);
  std::vector<Series> series;
  for (double volume : cfg.twist_sweep.volumes_ml) {
    transmission::ClosedSystem sys = base;
    sys.v_total_ml = volume;
    sys = transmission::balanced_at_rest(sys);
    Series line{fmt::format("{} mL", format_number(volume)), {}, {}};
    for (double alpha : linspace(0.0, sys.input.alpha_max_rad, cfg.twist_sweep.points)) {
      transmission::Equilibrium eq{};
      bool saturated = false;
      double overflow = 0.0;
      try {
        eq = transmission::solve_equilibrium(sys, alpha);
      } catch (const SaturationError& e) {
        eq = gait::solve_equilibrium_clamped(sys, alpha);
        saturated = true;
        overflow = e.overflow_ml();
      }
      csv.add(volume).add(alpha).add(eq.eta).add(eq.rho).add(eq.v_in_ml).add(eq.v_out_ml);
      csv.add(saturated).add(overflow);
      for (const auto& u : sys.outputs) csv.add(geometry::unit_bend(u, eq.rho));
      csv.end_row();
      line.x.push_back(alpha);
      line.y.push_back(geometry::unit_bend(lead, eq.rho));
    }
    series.push_back(std::move(line));
  }
  out.write("twist_sweep.csv", csv.str());
  out.write("twist_sweep.svg",
            render_svg(LineChart{"Bend of " + lead.id + " vs input twist",
                                 "input twist alpha (rad)", "unit bend (rad)", series, false}));
}

void cmd_gait(const RobotConfig& cfg, const ResolvedSchedule& sched, double dt,
              ArtifactWriter& out) {
  const auto timeline = gait::gait_timeline(cfg.robot, sched.schedule, dt);
  const auto profile0 = transmission::leg_bend_profile(
      cfg.robot.belt, cfg.robot.system_a, cfg.robot.system_b, 0.0);

  std::vector<std::string> header{"t_s", "phase_rad", "mode", "active_group", "eta_a",
                                  "eta_b"};
  for (const auto& leg : profile0.legs) {
    header.push_back(leg.id + "_bend_rad");
    header.push_back(leg.id + "_stance");
    header.push_back(leg.id + "_contact");
  }
  CsvTable csv(header);

  BarChart bars;
  bars.title = "Leg contact timeline (" + sched.name + ")";
  bars.x_label = "time (s)";
  bars.rows.push_back("mode");
  for (const auto& leg : profile0.legs) bars.rows.push_back(leg.id);
  bars.style_labels = {"group A contact", "group B contact", "walk", "turn-left",
                       "turn-right"};
  const double total = sched.schedule.duration();
  bars.x_max = total > 0.0 ? total : dt;

  for (std::size_t k = 0; k < timeline.size(); ++k) {
    const auto& sample = timeline[k];
    const auto& snap = sample.snapshot;
    // Equilibria again for the shrinkage rates; the snapshot keeps only bends.
    const double alpha_a = cfg.robot.belt.twist_fraction(transmission::Group::kA, snap.phase) *
                           cfg.robot.system_a.input.alpha_max_rad;
    const double alpha_b = cfg.robot.belt.twist_fraction(transmission::Group::kB, snap.phase) *
                           cfg.robot.system_b.input.alpha_max_rad;
    csv.add(sample.t).add(snap.phase).add(gait::to_string(snap.mode));
    csv.add(transmission::to_string(snap.active));
    csv.add(transmission::shrinkage_rate(cfg.robot.system_a.input, alpha_a));
    csv.add(transmission::shrinkage_rate(cfg.robot.system_b.input, alpha_b));
    for (const auto& leg : snap.legs) {
      csv.add(leg.bend).add(leg.role == gait::PhaseRole::kStance).add(leg.in_contact);
    }
    csv.end_row();

    const double t1 = k + 1 < timeline.size() ? timeline[k + 1].t : bars.x_max;
    bars.bars.push_back({0, sample.t, t1, 2 + static_cast<int>(snap.mode)});
    for (std::size_t i = 0; i < snap.legs.size(); ++i) {
      if (!snap.legs[i].in_contact) continue;
      const int style = snap.legs[i].group == transmission::Group::kA ? 0 : 1;
      auto& prev = bars.bars;
      // Extend the previous bar of this row when contiguous.
      bool merged = false;
      for (auto it = prev.rbegin(); it != prev.rend(); ++it) {
        if (it->row != i + 1) continue;
        if (it->end == sample.t && it->style == style) {
          it->end = t1;
          merged = true;
        }
        break;
      }
      if (!merged) bars.bars.push_back({i + 1, sample.t, t1, style});
    }
  }
  out.write("gait_timeline.csv", csv.str());
  out.write("gait_bars.svg", render_svg(bars));
}

void write_trajectory(const locomotion::Trajectory& traj, const ResolvedSchedule& sched,
                      ArtifactWriter& out) {
  CsvTable csv({"t_s", "x_cm", "y_cm", "heading_rad", "heading_deg", "mode"});
  Series path{"trajectory", {}, {}};
  Series heading{"heading", {}, {}};
  for (const auto& s : traj.samples) {
    csv.add(s.t).add(s.pose.x_cm).add(s.pose.y_cm).add(s.pose.heading_rad);
    csv.add(s.pose.heading_rad * kRadToDeg).add(gait::to_string(s.mode));
    csv.end_row();
    path.x.push_back(s.pose.x_cm);
    path.y.push_back(s.pose.y_cm);
    heading.x.push_back(s.t);
    heading.y.push_back(s.pose.heading_rad * kRadToDeg);
  }
  std::vector<Series> path_series{path};
  if (!sched.waypoints.empty()) {
    Series wp{"waypoints", {}, {}};
    for (const auto& p : sched.waypoints) {
      wp.x.push_back(p.x_cm);
      wp.y.push_back(p.y_cm);
    }
    path_series.push_back(wp);
  }

  CsvTable seg_csv({"index", "mode", "phase_lo_rad", "phase_hi_rad", "period_s", "cycles",
                    "direction", "start_s", "duration_s"});
  double start = 0.0;
  for (std::size_t i = 0; i < sched.schedule.segments.size(); ++i) {
    const ServoSegment& seg = sched.schedule.segments[i];
    seg_csv.add(static_cast<double>(i))
        .add(gait::to_string(gait::mode_of_phase(0.5 * (seg.phase_lo + seg.phase_hi))))
        .add(seg.phase_lo)
        .add(seg.phase_hi)
        .add(seg.period_s)
        .add(seg.cycles)
        .add(gait::to_string(seg.direction))
        .add(start)
        .add(seg.duration());
    seg_csv.end_row();
    start += seg.duration();
  }

  out.write("trajectory.csv", csv.str());
  out.write("schedule.csv", seg_csv.str());
  out.write("path.svg", render_svg(LineChart{"Path (" + sched.name + ")", "x (cm)", "y (cm)",
                                             path_series, true}));
  out.write("heading.svg",
            render_svg(LineChart{"Unwrapped heading (" + sched.name + ")", "time (s)",
                                 "heading (deg)", {heading}, false}));
}

void cmd_simulate(const RobotConfig& cfg, const ResolvedSchedule& sched, double dt,
                  ArtifactWriter& out) {
  const Calibration calib = cfg.resolved_calibration();
  locomotion::Pose start{0.0, 0.0, sched.initial_heading_rad};
  if (!sched.waypoints.empty()) {
    start = {sched.waypoints.front().x_cm, sched.waypoints.front().y_cm,
             sched.initial_heading_rad};
  }
  write_trajectory(locomotion::simulate(sched.schedule, calib, dt, start), sched, out);
}

void cmd_calibrate(const RobotConfig& cfg, double dt, ArtifactWriter& out) {
  const Calibration calib = locomotion::calibrate(cfg.targets);
  CsvTable csv({"quantity", "unit", "target", "simulated", "relative_error"});
  for (const auto& row : calibration_round_trip(calib, cfg.targets, dt)) {
    csv.add(row.quantity).add(row.unit).add(row.target).add(row.simulated);
    csv.add(row.relative_error);
    csv.end_row();
  }
  out.write("calibration.json", calibration_json(calib));
  out.write("calibration_roundtrip.csv", csv.str());
}

ServoSegment parse_segment(const json& j, const std::string& path, const RobotConfig& cfg) {
  if (!j.is_object()) throw ValidationError(path, "expected an object");
  auto number = [&](const char* key, std::optional<double> fallback) {
    if (!j.contains(key)) {
      if (fallback) return *fallback;
      throw ValidationError(path + "." + key, "missing required field");
    }
    if (!j.at(key).is_number()) throw ValidationError(path + "." + key, "expected a number");
    return j.at(key).get<double>();
  };
  for (const auto& item : j.items()) {
    static const std::vector<std::string> known{"mode",     "phase_lo_rad", "phase_hi_rad",
                                                "period_s", "cycles",       "direction"};
    if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
      throw ValidationError(path + "." + item.key(), "unknown field");
    }
  }
  ServoSegment seg;
  if (j.contains("mode")) {
    const std::string mode = j.at("mode").is_string() ? j.at("mode").get<std::string>() : "";
    if (mode == "walk") {
      seg = gait::walk_segment(cfg.targets.walk_period_s, 1.0);
    } else if (mode == "turn-left") {
      seg = gait::turn_left_segment(cfg.targets.left_period_s, 1.0);
    } else if (mode == "turn-right") {
      seg = gait::turn_right_segment(cfg.targets.right_period_s, 1.0);
    } else {
      throw ValidationError(path + ".mode", "must be walk, turn-left or turn-right");
    }
    if (j.contains("phase_lo_rad") || j.contains("phase_hi_rad")) {
      throw ValidationError(path, "give either mode or a phase interval, not both");
    }
  } else {
    seg.phase_lo = number("phase_lo_rad", std::nullopt);
    seg.phase_hi = number("phase_hi_rad", std::nullopt);
  }
  seg.period_s = number("period_s", seg.period_s);
  seg.cycles = number("cycles", std::nullopt);
  if (j.contains("direction")) {
    const json& d = j.at("direction");
    if (d == "forward") {
      seg.direction = gait::SweepDirection::kForward;
    } else if (d == "reverse") {
      seg.direction = gait::SweepDirection::kReverse;
    } else {
      throw ValidationError(path + ".direction", "must be forward or reverse");
    }
  }
  try {
    seg.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(path + "." + e.field(), e.message());
  }
  return seg;
}

locomotion::PlannerOptions planner_options(const RobotConfig& cfg, double dt,
                                           double heading) {
  locomotion::PlannerOptions opt;
  opt.walk_period_s = cfg.targets.walk_period_s;
  opt.left_period_s = cfg.targets.left_period_s;
  opt.right_period_s = cfg.targets.right_period_s;
  opt.initial_heading_rad = heading;
  opt.dt_s = dt;
  return opt;
}

ResolvedSchedule plan_path(std::string name, std::vector<Point> waypoints, double heading,
                           const RobotConfig& cfg, double dt) {
  ResolvedSchedule r;
  r.name = std::move(name);
  r.initial_heading_rad = heading;
  r.schedule = locomotion::follow_path(waypoints, cfg.resolved_calibration(),
                                       planner_options(cfg, dt, heading))
                   .schedule;
  r.waypoints = std::move(waypoints);
  return r;
}

std::string hex64(std::uint64_t v) { return fmt::format("{:016x}", v); }

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"characterize", "twist-sweep", "gait",
                                              "simulate", "calibrate"};
  return names;
}

const std::vector<std::string>& builtin_schedule_names() {
  static const std::vector<std::string> names{"walk", "turn-left", "turn-right", "s", "o"};
  return names;
}

std::filesystem::path resolve_out_dir(const CommandRequest& req, const RobotConfig& cfg) {
  if (req.out_dir) return *req.out_dir;
  if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') {
    return std::filesystem::path(env);
  }
  return std::filesystem::path(cfg.output_dir);
}

ResolvedSchedule parse_schedule(const std::string& json_text, const RobotConfig& cfg) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError("schedule", e.what());
  }
  if (!doc.is_object()) throw ValidationError("schedule", "expected an object");
  ResolvedSchedule r;
  r.name = doc.value("name", std::string("file"));
  if (doc.contains("waypoints")) {
    const json& w = doc.at("waypoints");
    if (!w.is_array()) throw ValidationError("schedule.waypoints", "expected an array");
    std::vector<Point> pts;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const json& p = w[i];
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
        throw ValidationError("schedule.waypoints[" + std::to_string(i) + "]",
                              "expected [x_cm, y_cm]");
      }
      pts.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    r.waypoints = std::move(pts);
    r.initial_heading_rad = doc.value("initial_heading_rad", 0.0);
    return r;
  }
  if (!doc.contains("segments") || !doc.at("segments").is_array()) {
    throw ValidationError("schedule.segments", "expected an array of segments");
  }
  const json& segs = doc.at("segments");
  for (std::size_t i = 0; i < segs.size(); ++i) {
    r.schedule.segments.push_back(
        parse_segment(segs[i], "schedule.segments[" + std::to_string(i) + "]", cfg));
  }
  return r;
}

ResolvedSchedule resolve_schedule(const std::string& name_or_file, const RobotConfig& cfg,
                                  double dt) {
  const auto& t = cfg.targets;
  ResolvedSchedule r;
  r.name = name_or_file;
  if (name_or_file == "walk") {
    r.schedule.segments = {gait::walk_segment(t.walk_period_s, 8.0)};
  } else if (name_or_file == "turn-left") {
    r.schedule.segments = {gait::turn_left_segment(t.left_period_s,
                                                   t.left_turn_90_s / t.left_period_s)};
  } else if (name_or_file == "turn-right") {
    r.schedule.segments = {gait::turn_right_segment(t.right_period_s,
                                                    t.right_turn_90_s / t.right_period_s)};
  } else if (name_or_file == "s") {
    return plan_path("s",
                     locomotion::s_curve_waypoints(cfg.paths.s_radius_cm,
                                                   cfg.paths.s_points_per_arc),
                     0.0, cfg, dt);
  } else if (name_or_file == "o") {
    return plan_path("o",
                     locomotion::o_curve_waypoints(cfg.paths.o_radius_cm, cfg.paths.o_points),
                     0.0, cfg, dt);
  } else {
    std::ifstream in(name_or_file, std::ios::binary);
    if (!in) {
      throw ValidationError("--schedule", "not a built-in schedule and cannot open file \"" +
                                              name_or_file + "\"");
    }
    std::ostringstream text;
    text << in.rdbuf();
    r = parse_schedule(text.str(), cfg);
    if (!r.waypoints.empty()) {
      return plan_path(r.name, r.waypoints, r.initial_heading_rad, cfg, dt);
    }
  }
  return r;
}

std::vector<CalibrationCheck> calibration_round_trip(const Calibration& calib,
                                                     const locomotion::CalibrationTargets& t,
                                                     double dt) {
  auto check = [](std::string q, std::string unit, double target, double sim) {
    return CalibrationCheck{std::move(q), std::move(unit), target, sim,
                            std::abs(sim - target) / std::abs(target)};
  };
  std::vector<CalibrationCheck> rows;

  ServoSchedule walk{{gait::walk_segment(t.walk_period_s, 8.0)}};
  const auto wt = locomotion::simulate(walk, calib, dt);
  const auto& end = wt.final_pose();
  rows.push_back(check("walk_speed", "cm/s", t.speed_cm_s * t.terrain_efficiency,
                       std::hypot(end.x_cm, end.y_cm) / wt.duration()));

  ServoSchedule left{{gait::turn_left_segment(t.left_period_s,
                                              2.0 * t.left_turn_90_s / t.left_period_s)}};
  const auto lt = locomotion::simulate(left, calib, dt);
  rows.push_back(check("left_turn_90", "s", t.left_turn_90_s,
                       locomotion::time_to_heading_change(lt, std::numbers::pi / 2.0)));

  ServoSchedule right{{gait::turn_right_segment(t.right_period_s,
                                                2.0 * t.right_turn_90_s / t.right_period_s)}};
  const auto rt = locomotion::simulate(right, calib, dt);
  rows.push_back(check("right_turn_90", "s", t.right_turn_90_s,
                       locomotion::time_to_heading_change(rt, std::numbers::pi / 2.0)));

  rows.push_back(check("turn_radius", "cm", t.turn_radius_cm,
                       locomotion::fit_circle(lt).radius_cm));
  return rows;
}

RunReport run_command(const RobotConfig& cfg, const CommandRequest& req) {
  const auto t0 = std::chrono::steady_clock::now();
  const double dt = req.dt_s.value_or(cfg.dt_s);
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("--dt", "must be positive");

  RunReport report;
  report.command = req.command;
  report.config_hash = cfg.hash;
  report.out_dir = resolve_out_dir(req, cfg);

  const auto& names = command_names();
  if (std::find(names.begin(), names.end(), req.command) == names.end()) {
    throw ValidationError("command", "unknown command \"" + req.command + "\"");
  }

  // Resolve everything that can fail before touching the output directory.
  ResolvedSchedule sched;
  if (req.command == "gait" || req.command == "simulate") {
    sched = resolve_schedule(req.schedule.value_or("walk"), cfg, dt);
    sched.schedule.validate();
    report.schedule = sched.name;
  }

  ArtifactWriter out(report.out_dir);
  if (req.command == "characterize") {
    cmd_characterize(cfg, out);
  } else if (req.command == "twist-sweep") {
    cmd_twist_sweep(cfg, out);
  } else if (req.command == "gait") {
    cmd_gait(cfg, sched, dt, out);
  } else if (req.command == "simulate") {
    cmd_simulate(cfg, sched, dt, out);
  } else {
    cmd_calibrate(cfg, dt, out);
  }
  report.files = out.manifest();
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.write("run_report.json", report_json(report));
  return report;
}

std::string report_json(const RunReport& report) {
  json files = json::array();
  for (const auto& f : report.files) {
    files.push_back({{"file", f.file}, {"bytes", f.bytes}, {"fnv1a64", hex64(f.fnv1a64)}});
  }
  json j = {{"command", report.command},
            {"config_hash", hex64(report.config_hash)},
            {"out_dir", report.out_dir.string()},
            {"files", files},
            {"wall_time_s", report.wall_time_s}};
  if (!report.schedule.empty()) j["schedule"] = report.schedule;
  return j.dump(2) + "\n";
}

int run_cli(const CommandRequest& req, std::ostream& out, std::ostream& err) {
  try {
    const RobotConfig cfg = load_config(req.config_path);
    const RunReport report = run_command(cfg, req);
    for (const auto& f : report.files) out << (report.out_dir / f.file).string() << "\n";
    out << (report.out_dir / "run_report.json").string() << "\n";
    return kExitOk;
  } catch (const ValidationError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const PlanningError& e) {
    err << "planning error: " << e.what() << "\n";
    return kExitSolverError;
  } catch (const SaturationError& e) {
    err << "solver error: " << e.what() << "\n";
    return kExitSolverError;
  } catch (const DomainError& e) {
    err << "solver error: " << e.what() << "\n";
    return kExitSolverError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace bests::sim
