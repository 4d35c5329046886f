#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "firenav/bt/parser.hpp"
#include "firenav/fire/detect.hpp"
#include "firenav/fire/estimator.hpp"
#include "firenav/mcl/mcl.hpp"
#include "firenav/mission/benchmarks.hpp"
#include "firenav/mission/runner.hpp"
#include "firenav/plan/planner.hpp"
#include "firenav/sim/scenario.hpp"
#include "firenav/track/trackers.hpp"
#include "firenav/world/likelihood_field.hpp"

namespace py = pybind11;
using namespace firenav;

namespace {

std::vector<Vec3> to_points(const py::array_t<double>& arr) {
  const auto buf = arr.unchecked<2>();
  if (buf.shape(1) != 3) throw std::invalid_argument("expected Nx3 array");
  std::vector<Vec3> pts(buf.shape(0));
  for (py::ssize_t i = 0; i < buf.shape(0); ++i)
    pts[i] = {buf(i, 0), buf(i, 1), buf(i, 2)};
  return pts;
}

py::array_t<double> from_points(const std::vector<Vec3>& pts) {
  py::array_t<double> arr({static_cast<py::ssize_t>(pts.size()),
                           static_cast<py::ssize_t>(3)});
  auto buf = arr.mutable_unchecked<2>();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    buf(i, 0) = pts[i].x;
    buf(i, 1) = pts[i].y;
    buf(i, 2) = pts[i].z;
  }
  return arr;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multi-robot firefighting stack: localization, planning, "
            "perception and mission simulation";

  py::class_<world::VoxelGrid>(m, "VoxelGrid")
      .def(py::init([](double resolution, std::array<int, 3> dims,
                       std::array<double, 3> origin) {
             return world::VoxelGrid(
                 resolution, {dims[0], dims[1], dims[2]},
                 {origin[0], origin[1], origin[2]});
           }),
           py::arg("resolution"), py::arg("dims"), py::arg("origin"))
      .def_property_readonly("resolution", &world::VoxelGrid::resolution)
      .def_property_readonly("occupied_count",
                             &world::VoxelGrid::occupied_count)
      .def_property_readonly(
          "dims",
          [](const world::VoxelGrid& g) {
            return std::array<int, 3>{g.dims().x, g.dims().y, g.dims().z};
          })
      .def("set_occupied",
           [](world::VoxelGrid& g, int x, int y, int z) {
             g.set_occupied({x, y, z});
           })
      .def("occupied",
           [](const world::VoxelGrid& g, int x, int y, int z) {
             return g.occupied({x, y, z});
           })
      .def("occupied_at", [](const world::VoxelGrid& g, double x, double y,
                             double z) { return g.occupied_at({x, y, z}); });

  m.def(
      "build_voxel_grid",
      [](const py::array_t<double>& points, double resolution) {
        return world::VoxelGrid::build(world::PointMap(to_points(points)),
                                       resolution);
      },
      py::arg("points"), py::arg("resolution"));

  py::class_<world::LikelihoodField>(m, "LikelihoodField")
      .def_property_readonly("peak", &world::LikelihoodField::peak)
      .def("query", [](const world::LikelihoodField& f, double x, double y,
                       double z) { return f.query({x, y, z}); });
  m.def(
      "build_likelihood_field",
      [](const world::VoxelGrid& grid, double sigma, double truncation) {
        return world::LikelihoodField::build(grid, sigma, truncation);
      },
      py::arg("grid"), py::arg("sigma"), py::arg("truncation_radius"));

  py::class_<world::DistanceField>(m, "DistanceField")
      .def_property_readonly("max_dist", &world::DistanceField::max_dist)
      .def("at_point", [](const world::DistanceField& f, double x, double y,
                          double z) { return f.at_point({x, y, z}); });
  m.def(
      "build_distance_field",
      [](const world::VoxelGrid& grid, double max_dist) {
        return world::DistanceField::build(grid, max_dist);
      },
      py::arg("grid"), py::arg("max_dist"));

  m.def(
      "line_of_sight",
      [](const world::VoxelGrid& grid, std::array<double, 3> a,
         std::array<double, 3> b, double max_dist) {
        return plan::line_of_sight(grid, {a[0], a[1], a[2]},
                                   {b[0], b[1], b[2]}, max_dist);
      },
      py::arg("grid"), py::arg("a"), py::arg("b"), py::arg("max_dist"));

  py::class_<plan::Path>(m, "Path")
      .def_property_readonly(
          "waypoints",
          [](const plan::Path& p) { return from_points(p.waypoints); })
      .def_readonly("length", &plan::Path::length)
      .def_readonly("min_clearance", &plan::Path::min_clearance)
      .def_readonly("expanded_nodes", &plan::Path::expanded_nodes);

  m.def(
      "plan",
      [](const world::VoxelGrid& grid, const world::DistanceField& dist,
         std::array<double, 3> start, std::array<double, 3> goal,
         double cost_weight, double max_line_of_sight, double inflation,
         const std::string& mode) {
        plan::PlannerConfig cfg;
        cfg.cost_weight = cost_weight;
        cfg.max_line_of_sight = max_line_of_sight;
        cfg.inflation_radius = inflation;
        cfg.mode = mode == "planar" ? plan::PlannerMode::Planar
                                    : plan::PlannerMode::Volumetric;
        return plan::plan(grid, dist, {start[0], start[1], start[2]},
                          {goal[0], goal[1], goal[2]}, cfg);
      },
      py::arg("grid"), py::arg("dist"), py::arg("start"), py::arg("goal"),
      py::arg("cost_weight") = 0.0,
      py::arg("max_line_of_sight") =
          std::numeric_limits<double>::infinity(),
      py::arg("inflation") = 0.0, py::arg("mode") = "volumetric");

  py::class_<mcl::PoseEstimate>(m, "PoseEstimate")
      .def_property_readonly(
          "position",
          [](const mcl::PoseEstimate& e) {
            return std::array<double, 3>{e.pose.position.x, e.pose.position.y,
                                         e.pose.position.z};
          })
      .def_property_readonly(
          "yaw", [](const mcl::PoseEstimate& e) { return e.pose.yaw; })
      .def_readonly("yaw_var", &mcl::PoseEstimate::yaw_var);

  py::class_<mcl::MclFilter>(m, "MclFilter")
      .def(py::init([](int particles, uint64_t seed, double alpha,
                       bool use_altimeter, bool use_yaw, bool use_gps) {
             mcl::MclConfig cfg;
             cfg.particle_count = particles;
             cfg.alpha = alpha;
             cfg.use_altimeter = use_altimeter;
             cfg.use_yaw = use_yaw;
             cfg.use_gps = use_gps;
             return mcl::MclFilter(cfg, seed);
           }),
           py::arg("particles") = 1000, py::arg("seed") = 1,
           py::arg("alpha") = 1.0, py::arg("use_altimeter") = true,
           py::arg("use_yaw") = true, py::arg("use_gps") = false)
      .def("initialize",
           [](mcl::MclFilter& f, std::array<double, 4> pose,
              std::array<double, 4> spread) {
             f.initialize({{pose[0], pose[1], pose[2]}, pose[3]},
                          {spread[0], spread[1], spread[2], spread[3]});
           })
      .def("predict",
           [](mcl::MclFilter& f, double dx, double dy, double dz,
              double dyaw) { f.predict({dx, dy, dz, dyaw}); })
      .def("should_update", &mcl::MclFilter::should_update)
      .def(
          "update",
          [](mcl::MclFilter& f, const py::array_t<double>& cloud,
             const world::LikelihoodField& field, double roll, double pitch,
             std::optional<std::array<double, 3>> gps, double altimeter_z,
             double compass_yaw) {
            std::optional<Vec3> g;
            if (gps) g = Vec3{(*gps)[0], (*gps)[1], (*gps)[2]};
            f.update(to_points(cloud), field, roll, pitch, g, altimeter_z,
                     compass_yaw);
          },
          py::arg("cloud"), py::arg("field"), py::arg("roll") = 0.0,
          py::arg("pitch") = 0.0, py::arg("gps") = std::nullopt,
          py::arg("altimeter_z") = 0.0, py::arg("compass_yaw") = 0.0)
      .def("estimate", &mcl::MclFilter::estimate);

  py::class_<fire::FireDetection2D>(m, "FireDetection2D")
      .def_readonly("u", &fire::FireDetection2D::u)
      .def_readonly("v", &fire::FireDetection2D::v)
      .def_readonly("pixel_count", &fire::FireDetection2D::pixel_count)
      .def_readonly("mean_temperature",
                    &fire::FireDetection2D::mean_temperature);

  m.def(
      "segment_fire",
      [](const py::array_t<double>& image, double threshold, int min_blob) {
        const auto buf = image.unchecked<2>();
        fire::ThermalImage img;
        img.height = static_cast<int>(buf.shape(0));
        img.width = static_cast<int>(buf.shape(1));
        img.values.resize(static_cast<std::size_t>(img.width) * img.height);
        for (int v = 0; v < img.height; ++v)
          for (int u = 0; u < img.width; ++u) img.at(u, v) = buf(v, u);
        return fire::segment_fire(img, threshold, min_blob);
      },
      py::arg("image"), py::arg("threshold") = 60.0,
      py::arg("min_blob") = 4);

  py::class_<fire::FireEstimate3D>(m, "FireEstimate3D")
      .def(py::init<>())
      .def("fuse",
           [](fire::FireEstimate3D& e, std::array<double, 3> z,
              const Eigen::Matrix3d& R) {
             e.fuse({z[0], z[1], z[2]}, R);
           })
      .def_property_readonly("count", &fire::FireEstimate3D::count)
      .def_property_readonly("mean",
                             [](const fire::FireEstimate3D& e) {
                               const Vec3 mu = e.mean();
                               return std::array<double, 3>{mu.x, mu.y, mu.z};
                             })
      .def_property_readonly("covariance", &fire::FireEstimate3D::covariance)
      .def_property_readonly("covariance_trace",
                             &fire::FireEstimate3D::covariance_trace);

  m.def(
      "pure_pursuit",
      [](const py::array_t<double>& path, std::array<double, 4> pose,
         double look_ahead, double nominal_speed) {
        track::PurePursuitConfig cfg;
        cfg.look_ahead = look_ahead;
        cfg.nominal_speed = nominal_speed;
        const auto pts = to_points(path);
        const auto cmd = track::pure_pursuit(
            pts, {{pose[0], pose[1], pose[2]}, pose[3]}, cfg);
        return std::make_pair(cmd.v, cmd.omega);
      },
      py::arg("path"), py::arg("pose"), py::arg("look_ahead") = 1.0,
      py::arg("nominal_speed") = 0.5);

  m.def(
      "saturated_proportional",
      [](std::array<double, 3> target, std::array<double, 4> pose,
         double desired_yaw, double gain, double max_xy, double max_z) {
        track::SaturatedProportionalConfig cfg;
        cfg.gain = gain;
        cfg.max_speed_xy = max_xy;
        cfg.max_speed_z = max_z;
        const auto cmd = track::saturated_proportional(
            {target[0], target[1], target[2]},
            {{pose[0], pose[1], pose[2]}, pose[3]}, desired_yaw, cfg);
        return std::make_tuple(cmd.velocity.x, cmd.velocity.y,
                               cmd.velocity.z, cmd.yaw_rate);
      },
      py::arg("target"), py::arg("pose"), py::arg("desired_yaw") = 0.0,
      py::arg("gain") = 0.8, py::arg("max_xy") = 1.5, py::arg("max_z") = 1.0);

  m.def(
      "validate_tree",
      [](const std::string& path) {
        const auto root = bt::parse_tree(path);
        return std::string(root->type()) + ":" + root->name();
      },
      py::arg("path"), "Parses a mission tree file; raises on errors");

  m.def(
      "run_scenario",
      [](const std::string& scenario_path, const std::string& out_dir,
         std::optional<uint64_t> seed, std::optional<double> duration) {
        sim::Scenario sc = sim::load_scenario(scenario_path);
        if (seed) sc.seed = *seed;
        if (duration) sc.duration = *duration;
        const auto result = mission::run_scenario(sc, out_dir);
        py::dict d;
        d["exit_code"] = result.exit_code;
        d["sim_duration"] = result.sim_duration;
        d["out_dir"] = result.out_dir;
        return d;
      },
      py::arg("scenario"), py::arg("out_dir"), py::arg("seed") = std::nullopt,
      py::arg("duration") = std::nullopt);

  m.def("bench_mcl", [](uint64_t seed, double duration) {
    py::list rows;
    for (const auto& r : mission::bench_mcl(seed, duration)) {
      py::dict d;
      d["combo"] = r.combo;
      d["pos_rmse"] = r.pos_rmse;
      d["z_rmse"] = r.z_rmse;
      d["yaw_rmse"] = r.yaw_rmse;
      rows.append(d);
    }
    return rows;
  }, py::arg("seed") = 7, py::arg("duration") = 200.0);
}
