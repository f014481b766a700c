#include "bests_sim/config.hpp"

#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "bests/errors.hpp"
#include "json.hpp"

namespace bests::sim {

using nlohmann::json;

namespace {

// Cursor into the document that remembers its dotted path and which keys
// were consumed, so that typos are reported instead of ignored.
class Node {
 public:
  Node(const json& value, std::string path) : value_(value), path_(std::move(path)) {}

  const std::string& path() const { return path_; }

  bool has(const std::string& key) {
    if (!value_.contains(key)) return false;
    used_.insert(key);
    return true;
  }

  Node child(const std::string& key) {
    require_object();
    if (!has(key)) throw ValidationError(join(key), "missing required section");
    return Node(value_.at(key), join(key));
  }

  double number(const std::string& key, double fallback) {
    require_object();
    if (!has(key)) return fallback;
    const json& v = value_.at(key);
    if (!v.is_number()) throw ValidationError(join(key), "expected a number");
    return v.get<double>();
  }

  double required_number(const std::string& key) {
    require_object();
    if (!has(key)) throw ValidationError(join(key), "missing required field");
    return number(key, 0.0);
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) {
    require_object();
    if (!has(key)) return fallback;
    const json& v = value_.at(key);
    if (!v.is_number_integer()) throw ValidationError(join(key), "expected an integer");
    return v.get<std::int64_t>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    require_object();
    if (!has(key)) return fallback;
    const json& v = value_.at(key);
    if (!v.is_string()) throw ValidationError(join(key), "expected a string");
    return v.get<std::string>();
  }

  const json& raw() const { return value_; }

  void require_object() const {
    if (!value_.is_object()) throw ValidationError(path_, "expected an object");
  }

  // Rejects keys nobody asked for.
  void finish() const {
    for (const auto& item : value_.items()) {
      if (!used_.count(item.key())) {
        throw ValidationError(join(item.key()), "unknown field");
      }
    }
  }

  std::string join(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

 private:
  const json& value_;
  std::string path_;
  std::set<std::string> used_;
};

void require(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw ValidationError(field, message);
}

geometry::BellowsUnit parse_unit(Node node) {
  node.require_object();
  geometry::BellowsUnit unit;
  unit.id = node.text("id", "");
  require(!unit.id.empty(), node.join("id"), "missing unit id");
  const std::string size = node.text("size_class", "");
  if (size == "large") {
    unit.size_class = geometry::SizeClass::kLarge;
  } else if (size == "small") {
    unit.size_class = geometry::SizeClass::kSmall;
  } else {
    throw ValidationError(node.join("size_class"), "must be \"large\" or \"small\"");
  }
  const double radius = node.required_number("radius_mm");
  const double beta = node.number("beta", 0.5);
  const double depth = node.required_number("depth_mm");
  try {
    unit.segment = geometry::SegmentGeometry(radius, beta, depth);
  } catch (const DomainError& e) {
    throw ValidationError(node.path(), e.what());
  }
  const std::int64_t n = node.integer("n_segments", 1);
  require(n >= 1 && n <= 1000, node.join("n_segments"), "must lie in [1, 1000]");
  unit.n_segments = static_cast<int>(n);
  unit.v_flat_ml = node.number("v_flat_ml", 0.0);
  require(unit.v_flat_ml >= 0.0, node.join("v_flat_ml"), "must be >= 0");
  node.finish();
  return unit;
}

transmission::ClosedSystem parse_system(Node node) {
  node.require_object();
  transmission::ClosedSystem sys;
  sys.v_total_ml = node.number("v_total_ml", 600.0);
  require(sys.v_total_ml > 0.0, node.join("v_total_ml"), "must be positive");

  Node in = node.child("input");
  in.require_object();
  const bool explicit_rest = in.has("v_rest_ml");
  sys.input.v_rest_ml = in.number("v_rest_ml", 0.0);
  sys.input.alpha_max_rad = in.number("alpha_max_rad", std::numbers::pi);
  const std::int64_t ribs = in.integer("ribs", 6);
  require(ribs >= 0 && ribs <= 1000, in.join("ribs"), "must lie in [0, 1000]");
  sys.input.ribs = static_cast<int>(ribs);
  sys.input.squeeze_exponent = in.number("squeeze_exponent", 1.0);
  sys.input.gain_base = in.number("gain_base", 0.015);
  sys.input.gain_per_rib = in.number("gain_per_rib", 0.005);
  in.finish();

  node.has("outputs");
  const json& outs = node.raw().contains("outputs") ? node.raw().at("outputs") : json();
  require(outs.is_array(), node.join("outputs"), "expected an array of units");
  for (std::size_t i = 0; i < outs.size(); ++i) {
    sys.outputs.push_back(
        parse_unit(Node(outs[i], node.join("outputs") + "[" + std::to_string(i) + "]")));
  }
  int large = 0;
  int small = 0;
  for (const auto& u : sys.outputs) {
    (u.size_class == geometry::SizeClass::kLarge ? large : small) += 1;
  }
  require(large == 3 && small == 2, node.join("outputs"),
          fmt::format("a group needs 3 large and 2 small units, found {} large "
                      "and {} small",
                      large, small));
  node.finish();

  if (!explicit_rest) sys = transmission::balanced_at_rest(sys);
  try {
    sys.validate();
  } catch (const DomainError& e) {
    throw ValidationError(node.path(), e.what());
  }
  return sys;
}

locomotion::CalibrationTargets parse_targets(Node node) {
  locomotion::CalibrationTargets t;
  t.body_length_cm = node.required_number("body_length_cm");
  t.speed_cm_s = node.required_number("speed_cm_s");
  t.walk_period_s = node.required_number("walk_period_s");
  t.left_turn_90_s = node.required_number("left_turn_90_s");
  t.left_period_s = node.required_number("left_period_s");
  t.right_turn_90_s = node.required_number("right_turn_90_s");
  t.right_period_s = node.required_number("right_period_s");
  t.turn_radius_cm = node.required_number("turn_radius_cm");
  t.terrain_efficiency = node.number("terrain_efficiency", 1.0);
  node.finish();
  try {
    t.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(node.join(e.field()), e.message());
  }
  return t;
}

locomotion::Calibration parse_calibration(Node node) {
  locomotion::Calibration c;
  c.body_length_cm = node.required_number("body_length_cm");
  c.stride_walk_cm = node.required_number("stride_walk_cm");
  c.dtheta_left_rad = node.required_number("dtheta_left_rad");
  c.dtheta_right_rad = node.required_number("dtheta_right_rad");
  c.turn_radius_cm = node.required_number("turn_radius_cm");
  c.terrain_efficiency = node.number("terrain_efficiency", 1.0);
  node.finish();
  try {
    c.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(node.join(e.field()), e.message());
  }
  return c;
}

RobotConfig parse_document(const json& doc) {
  Node root(doc, "");
  root.require_object();
  RobotConfig cfg;
  cfg.name = root.text("name", cfg.name);
  root.has("metadata");  // free-form, carried for reference only
  cfg.output_dir = root.text("output_dir", cfg.output_dir);
  cfg.dt_s = root.number("dt_s", cfg.dt_s);
  require(cfg.dt_s > 0.0, "dt_s", "must be positive");

  if (root.has("belt")) {
    Node belt(doc.at("belt"), "belt");
    belt.require_object();
    cfg.robot.belt.gear_ratio = belt.number("gear_ratio", 1.0);
    cfg.robot.belt.rest_phase_a =
        belt.number("rest_phase_a_rad", 5.0 * std::numbers::pi / 6.0);
    cfg.robot.belt.ticks_per_rev =
        belt.integer("ticks_per_rev", cfg.robot.belt.ticks_per_rev);
    belt.finish();
  } else {
    cfg.robot.belt.rest_phase_a = 5.0 * std::numbers::pi / 6.0;
  }
  try {
    cfg.robot.belt.validate();
  } catch (const DomainError& e) {
    throw ValidationError("belt", e.what());
  }

  Node systems = root.child("systems");
  systems.require_object();
  cfg.robot.system_a = parse_system(systems.child("A"));
  cfg.robot.system_b = parse_system(systems.child("B"));
  systems.finish();
  std::set<std::string> ids;
  for (const auto* sys : {&cfg.robot.system_a, &cfg.robot.system_b}) {
    for (const auto& u : sys->outputs) {
      require(ids.insert(u.id).second, "systems",
              "duplicate output id \"" + u.id + "\"");
    }
  }

  if (root.has("gait")) {
    Node g(doc.at("gait"), "gait");
    g.require_object();
    cfg.robot.thresholds.small_contact_bend_rad =
        g.number("small_contact_bend_rad", cfg.robot.thresholds.small_contact_bend_rad);
    g.finish();
    require(cfg.robot.thresholds.small_contact_bend_rad > 0.0,
            "gait.small_contact_bend_rad", "must be positive");
  }

  if (root.has("calibration_targets")) {
    cfg.targets = parse_targets(Node(doc.at("calibration_targets"), "calibration_targets"));
  }
  if (root.has("calibration")) {
    cfg.calibration = parse_calibration(Node(doc.at("calibration"), "calibration"));
  }

  if (root.has("characterize")) {
    Node c(doc.at("characterize"), "characterize");
    c.require_object();
    auto& s = cfg.characterize;
    s.rho_min_per_mm = c.number("rho_min_per_mm", s.rho_min_per_mm);
    s.rho_max_per_mm = c.number("rho_max_per_mm", s.rho_max_per_mm);
    s.points = static_cast<int>(c.integer("points", s.points));
    c.finish();
    require(s.rho_min_per_mm >= 0.0, "characterize.rho_min_per_mm", "must be >= 0");
    require(s.rho_max_per_mm >= s.rho_min_per_mm, "characterize.rho_max_per_mm",
            "must be >= rho_min_per_mm");
    require(s.points >= 1 && s.points <= 1000000, "characterize.points",
            "must lie in [1, 1000000]");
  }

  if (root.has("twist_sweep")) {
    Node t(doc.at("twist_sweep"), "twist_sweep");
    t.require_object();
    auto& s = cfg.twist_sweep;
    if (t.has("volumes_ml")) {
      const json& v = doc.at("twist_sweep").at("volumes_ml");
      require(v.is_array() && !v.empty(), "twist_sweep.volumes_ml",
              "expected a non-empty array of numbers");
      s.volumes_ml.clear();
      for (const auto& x : v) {
        require(x.is_number() && x.get<double>() > 0.0, "twist_sweep.volumes_ml",
                "volumes must be positive numbers");
        s.volumes_ml.push_back(x.get<double>());
      }
    }
    s.points = static_cast<int>(t.integer("points", s.points));
    t.finish();
    require(s.points >= 1 && s.points <= 1000000, "twist_sweep.points",
            "must lie in [1, 1000000]");
  }

  if (root.has("paths")) {
    Node p(doc.at("paths"), "paths");
    p.require_object();
    auto& s = cfg.paths;
    s.s_radius_cm = p.number("s_radius_cm", s.s_radius_cm);
    s.s_points_per_arc = static_cast<int>(p.integer("s_points_per_arc", s.s_points_per_arc));
    s.o_radius_cm = p.number("o_radius_cm", s.o_radius_cm);
    s.o_points = static_cast<int>(p.integer("o_points", s.o_points));
    p.finish();
    require(s.s_radius_cm > 0.0, "paths.s_radius_cm", "must be positive");
    require(s.s_points_per_arc >= 2, "paths.s_points_per_arc", "must be >= 2");
    require(s.o_radius_cm > 0.0, "paths.o_radius_cm", "must be positive");
    require(s.o_points >= 3, "paths.o_points", "must be >= 3");
  }

  root.finish();
  cfg.hash = fnv1a64(doc.dump());
  return cfg;
}

}  // namespace

locomotion::Calibration RobotConfig::resolved_calibration() const {
  if (calibration) return *calibration;
  return locomotion::calibrate(targets);
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

RobotConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError("<document>", e.what());
  }
  return parse_document(doc);
}

RobotConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("<file>", "cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string calibration_json(const locomotion::Calibration& calib) {
  json block = {{"calibration",
                 {{"body_length_cm", calib.body_length_cm},
                  {"stride_walk_cm", calib.stride_walk_cm},
                  {"dtheta_left_rad", calib.dtheta_left_rad},
                  {"dtheta_right_rad", calib.dtheta_right_rad},
                  {"turn_radius_cm", calib.turn_radius_cm},
                  {"terrain_efficiency", calib.terrain_efficiency}}}};
  return block.dump(2) + "\n";
}

}  // namespace bests::sim
