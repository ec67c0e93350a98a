// Python bindings for the core operations: pose-error metrics, bounding-cube
// geometry, RIoU, the fitting engine, the gradient self-check, and the PLY
// reader. Rotations cross the boundary as row-major 9-lists, points and
// translations as 3-sequences, cubes as 8x3 nested sequences.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cubepose/config.hpp"
#include "cubepose/ingest.hpp"
#include "cubepose/losses.hpp"
#include "cubepose/metrics.hpp"
#include "cubepose/optim.hpp"

namespace py = pybind11;
using namespace cubepose;

namespace {

using Arr3 = std::array<double, 3>;
using Arr9 = std::array<double, 9>;
using Cube8 = std::array<Arr3, 8>;

Vec3 to_vec3(const Arr3& a) { return {a[0], a[1], a[2]}; }
Arr3 from_vec3(const Vec3& v) { return {v.x, v.y, v.z}; }

Pose to_pose(const Arr9& rot, const Arr3& t) {
  return Pose{Rotation::from_matrix(rot), to_vec3(t)};
}

PointSet to_points(const std::vector<Arr3>& pts) {
  PointSet out;
  out.reserve(pts.size());
  for (const Arr3& p : pts) out.push_back(to_vec3(p));
  return out;
}

std::vector<Arr3> from_points(const PointSet& pts) {
  std::vector<Arr3> out;
  out.reserve(pts.size());
  for (const Vec3& p : pts) out.push_back(from_vec3(p));
  return out;
}

BoundingCube to_cube(const Cube8& vertices) {
  BoundingCube cube;
  for (int i = 0; i < 8; ++i) cube.vertices[i] = to_vec3(vertices[i]);
  if (!is_parallelepiped(cube))
    throw SchemaViolation("cube vertices do not form a parallelepiped");
  return cube;
}

Cube8 from_cube(const BoundingCube& cube) {
  Cube8 out;
  for (int i = 0; i < 8; ++i) out[i] = from_vec3(cube.vertices[i]);
  return out;
}

ChamferDirection to_direction(const std::string& s) {
  if (s == "pred_to_gt") return ChamferDirection::PredToGt;
  if (s == "gt_to_pred") return ChamferDirection::GtToPred;
  throw py::value_error("direction must be 'pred_to_gt' or 'gt_to_pred'");
}

BevBox to_bev(const std::array<double, 5>& b) {
  return BevBox{b[0], b[1], b[2], b[3], b[4]};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "bounding-cube pose metrics, losses, and fitting";

  py::register_exception<Error>(m, "Error");

  m.def(
      "add_error",
      [](const Arr9& rot_pred, const Arr3& t_pred, const Arr9& rot_gt,
         const Arr3& t_gt, const std::vector<Arr3>& points) {
        return add_error(to_pose(rot_pred, t_pred), to_pose(rot_gt, t_gt),
                         to_points(points));
      },
      py::arg("rotation_pred"), py::arg("translation_pred"),
      py::arg("rotation_gt"), py::arg("translation_gt"), py::arg("points"),
      "Mean distance between index-matched transformed model points (mm).");

  m.def(
      "add_s_error",
      [](const Arr9& rot_pred, const Arr3& t_pred, const Arr9& rot_gt,
         const Arr3& t_gt, const std::vector<Arr3>& points,
         const std::string& direction) {
        return add_s_error(to_pose(rot_pred, t_pred), to_pose(rot_gt, t_gt),
                           to_points(points), to_direction(direction));
      },
      py::arg("rotation_pred"), py::arg("translation_pred"),
      py::arg("rotation_gt"), py::arg("translation_gt"), py::arg("points"),
      py::arg("direction") = "gt_to_pred",
      "Directed-chamfer pose error for symmetric objects (mm).");

  m.def(
      "pose_error",
      [](const Arr9& rot_pred, const Arr3& t_pred, const Arr9& rot_gt,
         const Arr3& t_gt, const std::vector<Arr3>& points, bool symmetric,
         const std::string& direction) {
        return pose_error(to_pose(rot_pred, t_pred), to_pose(rot_gt, t_gt),
                          to_points(points), symmetric, to_direction(direction));
      },
      py::arg("rotation_pred"), py::arg("translation_pred"),
      py::arg("rotation_gt"), py::arg("translation_gt"), py::arg("points"),
      py::arg("symmetric") = false, py::arg("direction") = "gt_to_pred",
      "add_s_error when symmetric, add_error otherwise.");

  m.def(
      "diameter",
      [](const std::vector<Arr3>& points) { return diameter(to_points(points)); },
      py::arg("points"), "Maximum pairwise distance among the points (mm).");

  m.def(
      "cube_vertices",
      [](const Arr3& lo, const Arr3& hi) {
        return from_cube(cube_from_aabb(to_vec3(lo), to_vec3(hi)));
      },
      py::arg("min"), py::arg("max"),
      "Canonically ordered vertices of the axis-aligned cube [min, max].");

  m.def(
      "cube_volume",
      [](const Cube8& cube) { return volume(to_cube(cube)); }, py::arg("cube"),
      "Volume of a bounding cube (mm^3).");

  m.def(
      "scale_cube",
      [](const Cube8& cube, const Arr3& factors) {
        return from_cube(scale_cube(to_cube(cube), to_vec3(factors)));
      },
      py::arg("cube"), py::arg("factors"),
      "Per-axis scaling about the cube centroid; vertex order preserved.");

  m.def(
      "riou",
      [](const std::array<double, 5>& g, const std::array<double, 5>& p) {
        return riou(to_bev(g), to_bev(p));
      },
      py::arg("gt"), py::arg("pred"),
      "Rotation-decoupled BEV IoU of two (l, w, r, cx, cy) boxes, in [0, 1].");

  m.def(
      "subnet_shape",
      [](int phi) {
        const SubnetShape s = subnet_shape(phi);
        return py::make_tuple(s.n_iter, s.d_iter, s.d_rot);
      },
      py::arg("phi"),
      "(n_iter, d_iter, d_rot) for the compound scaling coefficient phi.");

  m.def(
      "fit_pose",
      [](const Cube8& prior, const Arr9& gt_rotation, const Arr3& gt_translation,
         const Cube8& gt_cube, const Arr9& init_rotation,
         const Arr3& init_translation, bool symmetric,
         const std::string& direction, bool fit_scale, double scale_offset,
         int max_iters, double step_size, double w_cube, double w_volume,
         double w_riou) {
        FitConfig cfg;
        cfg.max_iters = max_iters;
        cfg.step_size = step_size;
        cfg.weights = LossWeights{w_cube, w_volume, w_riou};
        cfg.loss_direction = to_direction(direction);
        cfg.symmetric = symmetric;
        cfg.fit_scale = fit_scale;
        cfg.eval_points = cube_points(to_cube(gt_cube));

        PoseScaleParams init;
        init.aa = rotation_to_axis_angle(Rotation::from_matrix(init_rotation));
        init.t = to_vec3(init_translation);
        const double raw0 = scale_offset == 0.0 ? 0.0
                            : scale_offset < 1.0 ? std::log(1.0 - scale_offset)
                                                 : 0.0;
        init.s = ScaleParam{Vec3{raw0, raw0, raw0}, scale_offset};

        const FitTrace trace =
            fit_pose(init, to_cube(prior), to_pose(gt_rotation, gt_translation),
                     to_cube(gt_cube), cfg);

        const Rotation r = trace.params.pose().rotation;
        py::list steps;
        for (const FitStep& s : trace.steps)
          steps.append(py::make_tuple(s.iter, s.loss, s.eval));
        py::dict out;
        out["rotation"] = r.m;
        out["translation"] = from_vec3(trace.params.t);
        out["scale"] = from_vec3(effective_scale(trace.params.s));
        out["cube"] = from_cube(predicted_cube(trace.params, to_cube(prior)));
        out["loss"] = trace.loss;
        out["converged"] = trace.converged;
        out["iterations"] = trace.iterations;
        out["steps"] = steps;
        return out;
      },
      py::arg("prior"), py::arg("gt_rotation"), py::arg("gt_translation"),
      py::arg("gt_cube"), py::arg("init_rotation"), py::arg("init_translation"),
      py::arg("symmetric") = false, py::arg("direction") = "pred_to_gt",
      py::arg("fit_scale") = true, py::arg("scale_offset") = 0.2,
      py::arg("max_iters") = 2000, py::arg("step_size") = 1e-2,
      py::arg("w_cube") = 1.0, py::arg("w_volume") = 0.1,
      py::arg("w_riou") = 0.0,
      "Gradient-descent fit of pose (and optionally scale) of a prior cube to "
      "a ground-truth cube; returns the fitted parameters and the loss trace.");

  m.def(
      "gradient_check",
      [](int n_instances, std::uint64_t seed) {
        const GradCheckReport rep =
            run_gradient_check(n_instances, 1e-5, seed, 1e-5);
        py::dict out;
        out["passed"] = rep.pass;
        out["max_rel_err"] = rep.max_rel_err;
        out["n_instances"] = rep.n_instances;
        return out;
      },
      py::arg("n_instances") = 100, py::arg("seed") = 0,
      "Compare analytic loss gradients against central finite differences.");

  m.def(
      "parse_ply",
      [](const py::bytes& data) {
        const MeshModel mesh = parse_ply(static_cast<std::string>(data));
        return py::make_tuple(from_points(mesh.vertices), mesh.faces);
      },
      py::arg("data"),
      "Parse an ascii or binary_little_endian PLY; returns (vertices, faces).");
}
