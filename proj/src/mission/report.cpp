#include "firenav/mission/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "firenav/core/geometry.hpp"

namespace firenav::mission {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<std::vector<double>> read_csv_numeric(const fs::path& path,
                                                  int skip_cols = 0) {
  std::ifstream in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    int col = 0;
    while (std::getline(ss, cell, ',')) {
      if (col++ < skip_cols) continue;
      row.push_back(std::atof(cell.c_str()));
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  return rows;
}

double percentile(std::vector<double> v, double p) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double idx = p * (v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(idx));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = idx - lo;
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

}  // namespace

json build_report(const std::string& run_dir) {
  json report;

  // Per-robot traces: distance traveled and localization RMSE.
  json robots = json::object();
  for (const auto& entry : fs::directory_iterator(run_dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("robot_", 0) != 0 || entry.path().extension() != ".csv")
      continue;
    const std::string id = name.substr(6, name.size() - 6 - 4);
    const auto rows = read_csv_numeric(entry.path());
    double distance = 0.0, sq_pos = 0.0, sq_yaw = 0.0;
    double dispensed = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      if (r.size() < 15) continue;
      if (i > 0) {
        const auto& p = rows[i - 1];
        distance += Vec3{r[1] - p[1], r[2] - p[2], r[3] - p[3]}.norm();
      }
      const double ex = r[5] - r[1], ey = r[6] - r[2], ez = r[7] - r[3];
      sq_pos += ex * ex + ey * ey + ez * ez;
      const double eyaw = wrap_angle(r[8] - r[4]);
      sq_yaw += eyaw * eyaw;
      dispensed = r[14];
      ++n;
    }
    json rj;
    rj["distance_traveled"] = distance;
    rj["pos_rmse"] = n ? std::sqrt(sq_pos / n) : 0.0;
    rj["yaw_rmse"] = n ? std::sqrt(sq_yaw / n) : 0.0;
    rj["water_dispensed"] = dispensed;
    robots[id] = rj;
  }

  // Fire outcomes: last row per fire.
  json fires = json::object();
  {
    std::ifstream in(fs::path(run_dir) / "fires.csv");
    std::string line;
    bool header = true;
    std::map<std::string, std::pair<double, double>> last;
    while (std::getline(in, line)) {
      if (header) {
        header = false;
        continue;
      }
      std::stringstream ss(line);
      std::string t, id, water, cov;
      std::getline(ss, t, ',');
      std::getline(ss, id, ',');
      std::getline(ss, water, ',');
      std::getline(ss, cov, ',');
      last[id] = {std::atof(water.c_str()), std::atof(cov.c_str())};
    }
    for (const auto& [id, wc] : last) {
      fires[id] = {{"water_on_target", wc.first},
                   {"blanket_coverage", wc.second}};
    }
  }

  // Events: collisions, mission outcomes, detections.
  json missions = json::object();
  int collisions = 0;
  int detections = 0;
  double end_time = 0.0;
  {
    std::ifstream in(fs::path(run_dir) / "events.jsonl");
    std::string line;
    while (std::getline(in, line)) {
      const json e = json::parse(line, nullptr, false);
      if (e.is_discarded()) continue;
      const std::string kind = e.value("kind", "");
      if (kind == "collision") ++collisions;
      if (kind == "detection") ++detections;
      if (kind == "mission_end")
        missions[e.value("robot", "?")] = e.value("detail", "");
      end_time = std::max(end_time, e.value("t", 0.0));
    }
  }

  // Planner timing percentiles (wall clock; informational only).
  {
    std::vector<double> ms;
    std::ifstream in(fs::path(run_dir) / "timing.csv");
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
      if (header) {
        header = false;
        continue;
      }
      const auto comma = line.find(',');
      if (comma != std::string::npos)
        ms.push_back(std::atof(line.c_str() + comma + 1));
    }
    report["local_plan_ms"] = {{"count", ms.size()},
                               {"p50", percentile(ms, 0.5)},
                               {"p95", percentile(ms, 0.95)}};
  }

  report["robots"] = robots;
  report["fires"] = fires;
  report["missions"] = missions;
  report["collisions"] = collisions;
  report["detections"] = detections;
  report["last_event_time"] = end_time;
  return report;
}

}  // namespace firenav::mission
