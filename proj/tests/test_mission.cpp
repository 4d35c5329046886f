#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "firenav/bt/parser.hpp"
#include "firenav/mission/report.hpp"
#include "firenav/mission/runner.hpp"
#include "firenav/sim/scenario.hpp"

using namespace firenav;
namespace fs = std::filesystem;

namespace {

/// Minimal scenario: one UGV drives to a waypoint in an open yard.
sim::Scenario mini_scenario(const fs::path& dir) {
  fs::create_directories(dir);
  {
    std::ofstream tree(dir / "mini.bt");
    tree << "Sequence name=Mini {\n"
         << "  Action name=Goto task=GoToGoal x=6 y=0 z=0\n"
         << "}\n";
  }
  {
    std::ofstream sc(dir / "mini.json");
    sc << R"({
      "name": "mini",
      "seed": 5,
      "duration": 120.0,
      "map": {
        "spacing": 0.1,
        "geometry": [
          {"type": "ground", "min": [-4, -6, 0], "max": [12, 6, 0]},
          {"type": "box", "min": [2.6, -1.2, 0], "max": [3.0, 6, 2.0]}
        ]
      },
      "robots": [
        {
          "id": "ugv",
          "kind": "ugv",
          "pose": [0, 0, 0, 0],
          "mission": "mini.bt",
          "rig": {"odom": {"drift_x": 1.01, "noise_xyz": 0.002, "noise_yaw": 0.001}}
        }
      ],
      "fires": []
    })";
  }
  return sim::load_scenario((dir / "mini.json").string());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("scenario loading: defaults, overrides, bad input diagnostics") {
  const auto sc = mini_scenario(fs::temp_directory_path() / "firenav_mini");
  CHECK(sc.seed == 5);
  REQUIRE(sc.robots.size() == 1);
  CHECK(sc.robots[0].kind == sim::RobotKind::Ugv);
  CHECK(sc.robots[0].planner.mode == plan::PlannerMode::Planar);
  CHECK(sc.robots[0].planner.cost_weight == doctest::Approx(0.15));
  CHECK(sc.robots[0].planner.max_line_of_sight == doctest::Approx(1.5));
  CHECK(!sc.map_points.empty());

  const fs::path bad = fs::temp_directory_path() / "firenav_bad.json";
  {
    std::ofstream out(bad);
    out << "{\"name\": \"x\"}";  // no map
  }
  CHECK_THROWS(sim::load_scenario(bad.string()));
}

TEST_CASE("mini mission: drives around the unmapped wall and succeeds") {
  const fs::path dir = fs::temp_directory_path() / "firenav_mini";
  const auto sc = mini_scenario(dir);
  const auto result =
      mission::run_scenario(sc, (dir / "out").string());
  CHECK(result.exit_code == 0);
  CHECK(result.sim_duration < 120.0);  // finished early
  CHECK(fs::exists(dir / "out" / "robot_ugv.csv"));
  CHECK(fs::exists(dir / "out" / "events.jsonl"));
  CHECK(fs::exists(dir / "out" / "report.json"));

  SUBCASE("report is a pure reduction of the traces") {
    const auto report = mission::build_report((dir / "out").string());
    CHECK(report["missions"]["ugv"] == "SUCCESS");
    // Independent recomputation of the distance column.
    std::ifstream in(dir / "out" / "robot_ugv.csv");
    std::string line;
    std::getline(in, line);  // header
    double dist = 0.0, px = 0, py = 0, pz = 0;
    bool first = true;
    double last_x = 0;
    while (std::getline(in, line)) {
      double t, x, y, z;
      std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &t, &x, &y, &z);
      if (!first)
        dist += std::sqrt((x - px) * (x - px) + (y - py) * (y - py) +
                          (z - pz) * (z - pz));
      px = x;
      py = y;
      pz = z;
      first = false;
      last_x = x;
    }
    CHECK(report["robots"]["ugv"]["distance_traveled"].get<double>() ==
          doctest::Approx(dist).epsilon(1e-9));
    CHECK(last_x > 5.5);  // actually got there
  }

  SUBCASE("same seed replays byte-identically") {
    mission::run_scenario(sc, (dir / "out_b").string());
    CHECK(slurp(dir / "out" / "robot_ugv.csv") ==
          slurp(dir / "out_b" / "robot_ugv.csv"));
    CHECK(slurp(dir / "out" / "events.jsonl") ==
          slurp(dir / "out_b" / "events.jsonl"));
    CHECK(slurp(dir / "out" / "fires.csv") ==
          slurp(dir / "out_b" / "fires.csv"));
  }
}

TEST_CASE("shipped mission fixtures all parse") {
  for (const char* name :
       {"trial1_m600.bt", "trial2_ugv.bt", "grand_m600.bt", "grand_ugv.bt"}) {
    const fs::path p = fs::path(FIRENAV_SOURCE_DIR) / "missions" / name;
    REQUIRE(fs::exists(p));
    const auto tree = bt::parse_tree(p.string());
    CHECK(std::string(tree->type()) == "Sequence");
  }
}

TEST_CASE("trial1 fixture mirrors the published structure") {
  const fs::path p =
      fs::path(FIRENAV_SOURCE_DIR) / "missions" / "trial1_m600.bt";
  const auto tree = bt::parse_tree(p.string());
  const auto& kids = tree->children();
  REQUIRE(kids.size() == 4);
  CHECK(std::string(kids[0]->type()) == "Action");       // TakeOff
  CHECK(kids[1]->name() == "FireOutsideMission");
  CHECK(std::string(kids[2]->type()) == "ForceSuccess"); // facade attempt
  CHECK(kids[3]->name() == "GotoAndLand");
}

TEST_CASE("shipped scenarios load") {
  for (const char* name :
       {"trial1.json", "trial2_ugv.json", "grand_challenge.json"}) {
    const fs::path p = fs::path(FIRENAV_SOURCE_DIR) / "scenarios" / name;
    REQUIRE(fs::exists(p));
    const auto sc = sim::load_scenario(p.string());
    CHECK(!sc.robots.empty());
    CHECK(!sc.map_points.empty());
    for (const auto& r : sc.robots)
      if (!r.mission_file.empty()) CHECK(fs::exists(r.mission_file));
  }
}
