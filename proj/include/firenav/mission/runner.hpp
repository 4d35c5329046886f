#pragma once

#include <string>

#include "firenav/sim/scenario.hpp"

namespace firenav::mission {

struct RunResult {
  /// 0 = every mission succeeded, 1 = run completed with failed missions.
  int exit_code = 1;
  double sim_duration = 0.0;
  std::string out_dir;
};

/// Runs the closed loop for a scenario and writes under out_dir:
///   robot_<id>.csv   per-robot trace (time, truth, estimate, commands)
///   fires.csv        per-fire water / coverage timeline
///   events.jsonl     mission event log
///   timing.csv       local-planner wall times (excluded from determinism)
///   report.json      reduction of the trace files
RunResult run_scenario(const sim::Scenario& scenario,
                       const std::string& out_dir);

}  // namespace firenav::mission
