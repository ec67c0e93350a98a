#pragma once

#include "cubepose/geometry.hpp"
#include "cubepose/metrics.hpp"

namespace cubepose {

// The 9 free reals of the fitting problem: rotation (axis-angle),
// translation, and the per-axis scale parameter.
struct PoseScaleParams {
  AxisAngle aa;
  Vec3 t;  // mm
  ScaleParam s;

  Pose pose() const { return Pose{axis_angle_to_rotation(aa), t}; }
};

// Bird's-eye-view rectangle: length along the box's own x axis, width along
// y, rotated by r about the world z axis, centered at (cx, cy).
struct BevBox {
  double l = 0.0;  // mm
  double w = 0.0;  // mm
  double r = 0.0;  // radians
  double cx = 0.0;
  double cy = 0.0;
};

struct LossWeights {
  double w_cube = 1.0;
  double w_volume = 0.1;
  double w_riou = 0.0;
};

// The prior cube reshaped by the effective scale, still in the object frame.
BoundingCube predicted_cube(const PoseScaleParams& params, const BoundingCube& prior);

// Mean distance between the posed prediction cube and the posed gt cube:
// vertex-to-vertex for asymmetric objects, directed chamfer (dir) for
// symmetric ones.
double cube_loss(const PoseScaleParams& params, const BoundingCube& prior,
                 const Pose& gt_pose, const BoundingCube& gt_cube,
                 ChamferDirection dir, bool symmetric);

// |V_pred - V_gt| / max(V_gt, 1 mm^3).
double volume_loss(const BoundingCube& pred, const BoundingCube& gt);

// Rotation-decoupled IoU of two BEV rectangles, in [0, 1]. Intersections are
// conservative: each box sees the other's axis-aligned bounding rectangle in
// its own frame.
double riou(const BevBox& g, const BevBox& p);

// Ground-plane footprint of a posed cube: extents from the cube's own frame,
// rotation = yaw of the pose, center = posed centroid.
BevBox bev_footprint(const BoundingCube& cube, const Pose& pose);

// w_cube * cube_loss + w_volume * volume_loss + w_riou * (1 - riou).
// Throws BadValue unless at least one weight is positive.
double combined_loss(const PoseScaleParams& params, const BoundingCube& prior,
                     const Pose& gt_pose, const BoundingCube& gt_cube,
                     const LossWeights& weights, ChamferDirection dir,
                     bool symmetric);

}  // namespace cubepose
