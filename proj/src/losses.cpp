#include "cubepose/losses.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "cubepose/riou_kernel.hpp"

namespace cubepose {

BoundingCube predicted_cube(const PoseScaleParams& params, const BoundingCube& prior) {
  return scale_cube(prior, effective_scale(params.s));
}

double cube_loss(const PoseScaleParams& params, const BoundingCube& prior,
                 const Pose& gt_pose, const BoundingCube& gt_cube,
                 ChamferDirection dir, bool symmetric) {
  const PointSet pred = apply_pose(params.pose(), cube_points(predicted_cube(params, prior)));
  const PointSet gt = apply_pose(gt_pose, cube_points(gt_cube));
  if (!symmetric) return mean_pointwise_distance(gt, pred);
  if (dir == ChamferDirection::PredToGt) return directed_chamfer(pred, gt);
  return directed_chamfer(gt, pred);
}

double volume_loss(const BoundingCube& pred, const BoundingCube& gt) {
  constexpr double kEps = 1.0;  // mm^3
  const double vg = volume(gt);
  return std::abs(volume(pred) - vg) / std::max(vg, kEps);
}

double riou(const BevBox& g, const BevBox& p) {
  const detail::BevBoxT<double> gt{g.l, g.w, g.r, g.cx, g.cy};
  const detail::BevBoxT<double> pt{p.l, p.w, p.r, p.cx, p.cy};
  return detail::riou_kernel(gt, pt);
}

BevBox bev_footprint(const BoundingCube& cube, const Pose& pose) {
  const Vec3 ext = cube_extents(cube);
  const Vec3 center = apply_pose(pose, cube_centroid(cube));
  const double yaw = std::atan2(pose.rotation.m[3], pose.rotation.m[0]);
  return BevBox{ext.x, ext.y, yaw, center.x, center.y};
}

double combined_loss(const PoseScaleParams& params, const BoundingCube& prior,
                     const Pose& gt_pose, const BoundingCube& gt_cube,
                     const LossWeights& weights, ChamferDirection dir,
                     bool symmetric) {
  if (weights.w_cube < 0.0 || weights.w_volume < 0.0 || weights.w_riou < 0.0)
    throw BadValue("loss weights must be >= 0");
  if (weights.w_cube <= 0.0 && weights.w_volume <= 0.0 && weights.w_riou <= 0.0)
    throw BadValue("at least one loss weight must be > 0");

  double total = 0.0;
  const BoundingCube pred = predicted_cube(params, prior);
  if (weights.w_cube > 0.0)
    total += weights.w_cube * cube_loss(params, prior, gt_pose, gt_cube, dir, symmetric);
  if (weights.w_volume > 0.0)
    total += weights.w_volume * volume_loss(pred, gt_cube);
  if (weights.w_riou > 0.0)
    total += weights.w_riou *
             (1.0 - riou(bev_footprint(gt_cube, gt_pose), bev_footprint(pred, params.pose())));
  return total;
}

}  // namespace cubepose
