#include <iostream>

#include "CLI11.hpp"
#include "bests_sim/commands.hpp"

int main(int argc, char** argv) {
  using namespace bests::sim;

  CLI::App app{"Simulator and characterization toolkit for a single-servo soft decapod robot"};
  app.set_version_flag("--version", "bests-sim 0.1.0");

  CommandRequest req;
  std::string config;
  std::string out_dir;
  double dt = 0.0;
  std::string schedule;

  app.add_option("command", req.command, "characterize | twist-sweep | gait | simulate | calibrate")
      ->required()
      ->check(CLI::IsMember(command_names()));
  app.add_option("--config", config, "robot configuration (JSON)")->required();
  auto* out_opt = app.add_option(
      "--out", out_dir, std::string("output directory (overrides $") + kOutDirEnv + ")");
  auto* dt_opt = app.add_option("--dt", dt, "sample interval in seconds");
  auto* sched_opt = app.add_option(
      "--schedule", schedule, "walk | turn-left | turn-right | s | o | <schedule.json>");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  req.config_path = config;
  if (*out_opt) req.out_dir = out_dir;
  if (*dt_opt) req.dt_s = dt;
  if (*sched_opt) req.schedule = schedule;
  return run_cli(req, std::cout, std::cerr);
}
