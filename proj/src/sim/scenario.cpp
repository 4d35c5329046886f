#include "firenav/sim/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <stdexcept>

#include "firenav/world/point_map.hpp"

namespace firenav::sim {

using nlohmann::json;

RobotSpec default_robot_spec(RobotKind kind) {
  RobotSpec spec;
  spec.kind = kind;
  if (kind == RobotKind::Ugv) {
    spec.tank_capacity = 3.0;
    spec.planner.mode = plan::PlannerMode::Planar;
    spec.planner.cost_weight = 0.15;
    spec.planner.max_line_of_sight = 1.5;
    spec.planner.inflation_radius = 0.4;
    spec.mcl.resample_sigma_z = 1e-4;  // ground vehicle: z pinned down
    spec.mcl.sigma_nz = 1e-4;
    spec.rig.altimeter_noise = 0.0;  // ground height is known exactly
    spec.rig.thermal.mount = ThermalMount::PanTilt;
    spec.extinguish.variant = fire::ProcedureVariant::UgvWater;
  } else {
    spec.tank_capacity = 1.0;
    spec.planner.mode = plan::PlannerMode::Volumetric;
    spec.planner.cost_weight = 0.0;
    spec.planner.max_line_of_sight =
        std::numeric_limits<double>::infinity();
    spec.planner.inflation_radius = 0.6;
    spec.rig.thermal.mount = ThermalMount::Forward;
    spec.extinguish.variant = fire::ProcedureVariant::UavFacadeWater;
  }
  spec.local.planner = spec.planner;
  // Local windows keep the global safety margin but replan fast.
  spec.local.planner.max_line_of_sight = spec.planner.max_line_of_sight;
  return spec;
}

void sample_box(std::vector<Vec3>& out, const Vec3& lo, const Vec3& hi,
                double spacing) {
  auto steps = [spacing](double a, double b) {
    return std::max(1, static_cast<int>(std::round((b - a) / spacing)));
  };
  const int nx = steps(lo.x, hi.x), ny = steps(lo.y, hi.y),
            nz = steps(lo.z, hi.z);
  for (int ix = 0; ix <= nx; ++ix)
    for (int iy = 0; iy <= ny; ++iy)
      for (int iz = 0; iz <= nz; ++iz) {
        const bool on_face = ix == 0 || ix == nx || iy == 0 || iy == ny ||
                             iz == 0 || iz == nz;
        if (!on_face) continue;
        out.push_back({lo.x + (hi.x - lo.x) * ix / nx,
                       lo.y + (hi.y - lo.y) * iy / ny,
                       lo.z + (hi.z - lo.z) * iz / nz});
      }
}

namespace {

Vec3 parse_vec3(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3)
    throw std::runtime_error(std::string("expected [x,y,z] for ") + what);
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Pose parse_pose(const json& j) {
  if (!j.is_array() || j.size() < 3)
    throw std::runtime_error("expected [x,y,z,(yaw)] pose");
  Pose p;
  p.position = {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
  if (j.size() > 3) p.yaw = j[3].get<double>();
  return p;
}

FireKind parse_fire_kind(const std::string& s) {
  if (s == "indoor_floor") return FireKind::IndoorFloor;
  if (s == "facade") return FireKind::Facade;
  if (s == "outdoor_ground") return FireKind::OutdoorGround;
  throw std::runtime_error("unknown fire kind: " + s);
}

ThermalMount parse_mount(const std::string& s) {
  if (s == "forward") return ThermalMount::Forward;
  if (s == "nadir") return ThermalMount::Nadir;
  if (s == "pan_tilt") return ThermalMount::PanTilt;
  throw std::runtime_error("unknown thermal mount: " + s);
}

void parse_gps(const json& j, GpsConfig& gps) {
  gps.xy_noise = j.value("xy_noise", gps.xy_noise);
  gps.z_noise = j.value("z_noise", gps.z_noise);
  if (j.contains("outlier")) {
    const json& o = j["outlier"];
    gps.mode = GpsMode::Outlier;
    gps.outlier.axis = o.value("axis", std::string("y")) == "x" ? 0 : 1;
    gps.outlier.velocity = o.value("velocity", 0.033);
    gps.outlier.start_time = o.value("start", 0.0);
    gps.outlier.end_time = o.value("end", 0.0);
  }
}

void parse_robot(const json& j, const std::filesystem::path& base,
                 RobotSpec& spec) {
  spec.id = j.at("id").get<std::string>();
  spec.initial_pose = parse_pose(j.at("pose"));
  spec.tank_capacity = j.value("tank", spec.tank_capacity);
  spec.carries_blanket = j.value("blanket", false);
  spec.start_time = j.value("start_time", 0.0);
  if (j.contains("mission"))
    spec.mission_file = (base / j.at("mission").get<std::string>()).string();

  if (j.contains("rig")) {
    const json& r = j["rig"];
    if (r.contains("lidar")) {
      const json& l = r["lidar"];
      spec.rig.lidar.channels = l.value("channels", spec.rig.lidar.channels);
      spec.rig.lidar.rays_per_channel =
          l.value("rays", spec.rig.lidar.rays_per_channel);
      spec.rig.lidar.vertical_fov =
          l.value("vertical_fov", spec.rig.lidar.vertical_fov);
      spec.rig.lidar.range_noise = l.value("noise", spec.rig.lidar.range_noise);
    }
    if (r.contains("gps")) parse_gps(r["gps"], spec.rig.gps);
    if (r.contains("odom")) {
      const json& o = r["odom"];
      spec.rig.odom.drift_x = o.value("drift_x", 1.0);
      spec.rig.odom.drift_y = o.value("drift_y", 1.0);
      spec.rig.odom.drift_z = o.value("drift_z", 1.0);
      spec.rig.odom.drift_yaw_rate = o.value("drift_yaw_rate", 0.0);
      spec.rig.odom.noise_xyz = o.value("noise_xyz", 0.0);
      spec.rig.odom.noise_yaw = o.value("noise_yaw", 0.0);
    }
    spec.rig.compass_noise = r.value("compass_noise", spec.rig.compass_noise);
    spec.rig.altimeter_noise =
        r.value("altimeter_noise", spec.rig.altimeter_noise);
    if (r.contains("thermal")) {
      const json& t = r["thermal"];
      spec.rig.thermal.mount = parse_mount(
          t.value("mount", spec.kind == RobotKind::Ugv ? "pan_tilt"
                                                       : "forward"));
      spec.rig.thermal.width = t.value("width", spec.rig.thermal.width);
      spec.rig.thermal.height = t.value("height", spec.rig.thermal.height);
      spec.rig.thermal.hfov = t.value("hfov", spec.rig.thermal.hfov);
    }
    if (r.value("thermal_nadir", false)) {
      ThermalConfig nadir = spec.rig.thermal;
      nadir.mount = ThermalMount::Nadir;
      spec.rig.thermal_nadir = nadir;
    }
  }

  if (j.contains("mcl")) {
    const json& m = j["mcl"];
    spec.mcl.particle_count = m.value("particles", spec.mcl.particle_count);
    spec.mcl.alpha = m.value("alpha", spec.mcl.alpha);
    spec.mcl.use_gps = m.value("use_gps", spec.mcl.use_gps);
    spec.mcl.use_altimeter = m.value("use_altimeter", spec.mcl.use_altimeter);
    spec.mcl.use_yaw = m.value("use_yaw", spec.mcl.use_yaw);
    spec.mcl.max_cloud_points =
        m.value("max_cloud_points", spec.mcl.max_cloud_points);
  }
  if (j.contains("planner")) {
    const json& p = j["planner"];
    spec.planner.cost_weight = p.value("cost_weight", spec.planner.cost_weight);
    if (p.contains("line_of_sight")) {
      const auto& v = p["line_of_sight"];
      spec.planner.max_line_of_sight =
          v.is_string() ? std::numeric_limits<double>::infinity()
                        : v.get<double>();
    }
    spec.planner.inflation_radius =
        p.value("inflation", spec.planner.inflation_radius);
    spec.planner.goal_tolerance =
        p.value("goal_tolerance", spec.planner.goal_tolerance);
    spec.local.planner = spec.planner;
  }
  if (j.contains("extinguish")) {
    const json& e = j["extinguish"];
    spec.extinguish.eject_duration =
        e.value("eject_duration", spec.extinguish.eject_duration);
    spec.extinguish.descend_height =
        e.value("descend_height", spec.extinguish.descend_height);
    spec.extinguish.square_half_side =
        e.value("square_half_side", spec.extinguish.square_half_side);
    spec.extinguish.time_budget =
        e.value("time_budget", spec.extinguish.time_budget);
  }
  spec.detect_threshold = j.value("detect_threshold", spec.detect_threshold);
}

}  // namespace

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("scenario parse error in " + path + ": " +
                             e.what());
  }
  const auto base = std::filesystem::path(path).parent_path();

  Scenario sc;
  sc.name = j.value("name", std::filesystem::path(path).stem().string());
  sc.seed = j.value("seed", 1);
  sc.duration = j.value("duration", 900.0);
  sc.map_resolution = j.value("resolution", 0.2);
  sc.likelihood_sigma = j.value("likelihood_sigma", 0.2);
  sc.likelihood_truncation = j.value("likelihood_truncation",
                                     3.0 * sc.likelihood_sigma);
  sc.distance_clamp = j.value("distance_clamp", 5.0);

  if (j.contains("wind")) sc.world.wind = parse_vec3(j["wind"], "wind");
  sc.world.blanket_forward_travel =
      j.value("blanket_forward_travel", sc.world.blanket_forward_travel);

  if (!j.contains("map")) throw std::runtime_error("scenario missing map");
  const json& map = j["map"];
  if (map.contains("file")) {
    const auto map_path = base / map.at("file").get<std::string>();
    sc.map_points = world::PointMap::load(map_path.string()).points();
  } else if (map.contains("geometry")) {
    const double spacing = map.value("spacing", 0.1);
    for (const json& g : map["geometry"]) {
      const std::string type = g.at("type").get<std::string>();
      if (type == "box") {
        sample_box(sc.map_points, parse_vec3(g.at("min"), "box min"),
                   parse_vec3(g.at("max"), "box max"), spacing);
      } else if (type == "ground") {
        // The plane is sampled half a cell below its nominal height so the
        // voxel slab's top face coincides with the walkable surface.
        const Vec3 lo = parse_vec3(g.at("min"), "ground min");
        const Vec3 hi = parse_vec3(g.at("max"), "ground max");
        const double z = lo.z - 0.5 * sc.map_resolution;
        sample_box(sc.map_points, {lo.x, lo.y, z}, {hi.x, hi.y, z}, spacing);
      } else {
        throw std::runtime_error("unknown geometry type: " + type);
      }
    }
  } else {
    throw std::runtime_error("map requires 'file' or 'geometry'");
  }
  if (sc.map_points.empty()) throw std::runtime_error("empty map");

  for (const json& r : j.value("robots", json::array())) {
    const std::string kind = r.value("kind", "ugv");
    RobotSpec spec = default_robot_spec(kind == "ugv" ? RobotKind::Ugv
                                                      : RobotKind::Uav);
    parse_robot(r, base, spec);
    sc.robots.push_back(std::move(spec));
  }

  int fire_counter = 0;
  for (const json& f : j.value("fires", json::array())) {
    FireSource fire;
    fire.id = f.value("id", "fire" + std::to_string(fire_counter++));
    fire.position = parse_vec3(f.at("position"), "fire position");
    fire.kind = parse_fire_kind(f.value("kind", "outdoor_ground"));
    fire.radius = f.value("radius", 0.25);
    fire.plate_temperature = f.value("temperature", 110.0);
    if (fire.plate_temperature > 110.0)
      throw std::runtime_error("plate temperature exceeds 110");
    fire.facing_yaw = f.value("facing_yaw", 0.0);
    sc.fires.push_back(std::move(fire));
  }
  return sc;
}

}  // namespace firenav::sim
