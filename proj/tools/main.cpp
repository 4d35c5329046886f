#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "firenav/mission/benchmarks.hpp"
#include "firenav/mission/runner.hpp"
#include "firenav/sim/scenario.hpp"

namespace {

int cmd_simulate(const std::string& scenario_path, long seed,
                 const std::string& out, double duration) {
  firenav::sim::Scenario sc;
  try {
    sc = firenav::sim::load_scenario(scenario_path);
  } catch (const std::exception& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return 2;
  }
  if (seed >= 0) sc.seed = static_cast<uint64_t>(seed);
  if (duration > 0) sc.duration = duration;
  try {
    const auto result = firenav::mission::run_scenario(sc, out);
    std::cout << "run complete: t=" << result.sim_duration
              << "s, outputs in " << result.out_dir << "\n";
    return result.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "run error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_bench_mcl(long seed, const std::string& out, double duration) {
  const auto rows =
      firenav::mission::bench_mcl(seed < 0 ? 7 : seed, duration);
  std::ofstream csv(out);
  if (!csv) {
    std::cerr << "cannot write " << out << "\n";
    return 2;
  }
  csv << "combo,pos_rmse,z_rmse,yaw_rmse,mean_update_ms,max_update_ms,"
         "updates\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f,%.6f,%.3f,%.3f,%d\n",
                  r.combo.c_str(), r.pos_rmse, r.z_rmse, r.yaw_rmse,
                  r.mean_update_ms, r.max_update_ms, r.updates);
    csv << buf;
    std::cout << buf;
  }
  return 0;
}

int cmd_bench_planner(const std::string& sweep, const std::string& out) {
  // sweep grammar: "cw=0,0.15,0.3;los=1,1.5,2,4,inf"
  std::vector<double> cws = {0.0, 0.15, 0.3};
  std::vector<double> loss = {1.0, 1.5, 2.0, 4.0,
                              std::numeric_limits<double>::infinity()};
  if (!sweep.empty()) {
    cws.clear();
    loss.clear();
    std::stringstream ss(sweep);
    std::string part;
    while (std::getline(ss, part, ';')) {
      const auto eq = part.find('=');
      if (eq == std::string::npos) {
        std::cerr << "bad sweep spec: " << part << "\n";
        return 2;
      }
      const std::string key = part.substr(0, eq);
      std::stringstream vs(part.substr(eq + 1));
      std::string val;
      while (std::getline(vs, val, ',')) {
        const double v = val == "inf"
                             ? std::numeric_limits<double>::infinity()
                             : std::atof(val.c_str());
        if (key == "cw") cws.push_back(v);
        else if (key == "los") loss.push_back(v);
        else {
          std::cerr << "unknown sweep key: " << key << "\n";
          return 2;
        }
      }
    }
    if (cws.empty() || loss.empty()) {
      std::cerr << "sweep needs cw= and los= lists\n";
      return 2;
    }
  }
  const auto rows = firenav::mission::bench_planner(cws, loss);
  std::ofstream csv(out);
  if (!csv) {
    std::cerr << "cannot write " << out << "\n";
    return 2;
  }
  csv << "scenario,cost_weight,line_of_sight,expanded,length,min_clearance,"
         "wall_ms\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%.3f,%s,%ld,%.4f,%.4f,%.3f\n",
                  r.scenario.c_str(), r.cost_weight,
                  std::isinf(r.line_of_sight)
                      ? "inf"
                      : std::to_string(r.line_of_sight).c_str(),
                  r.expanded, r.length, r.min_clearance, r.wall_ms);
    csv << buf;
    std::cout << buf;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Autonomous firefighting navigation stack"};
  app.require_subcommand(1);

  std::string scenario, out_dir = "out", sweep;
  long seed = -1;
  double duration = -1.0;

  auto* sim = app.add_subcommand("simulate",
                                 "Run a scenario closed-loop and emit traces");
  sim->add_option("--scenario", scenario, "Scenario JSON file")->required();
  sim->add_option("--seed", seed, "Override the scenario seed");
  sim->add_option("--out", out_dir, "Output directory");
  sim->add_option("--duration", duration, "Override duration (seconds)");

  auto* bmcl = app.add_subcommand(
      "bench-mcl", "Localization RMSE per sensor combination");
  std::string mcl_out = "bench_mcl.csv";
  double mcl_duration = 200.0;
  bmcl->add_option("--seed", seed, "Benchmark seed");
  bmcl->add_option("--out", mcl_out, "Output CSV");
  bmcl->add_option("--duration", mcl_duration, "Trajectory length (seconds)");

  auto* bpl = app.add_subcommand(
      "bench-planner", "Planner sweep over cost weight and line of sight");
  std::string planner_out = "bench_planner.csv";
  bpl->add_option("--sweep", sweep, "e.g. cw=0,0.15;los=1.5,2,inf");
  bpl->add_option("--out", planner_out, "Output CSV");

  CLI11_PARSE(app, argc, argv);

  if (sim->parsed()) return cmd_simulate(scenario, seed, out_dir, duration);
  if (bmcl->parsed()) return cmd_bench_mcl(seed, mcl_out, mcl_duration);
  if (bpl->parsed()) return cmd_bench_planner(sweep, planner_out);
  return 2;
}
