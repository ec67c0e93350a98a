#pragma once

#include <array>
#include <string>
#include <vector>

#include "cubepose/geometry.hpp"
#include "cubepose/hull.hpp"
#include "cubepose/ingest.hpp"

namespace cubepose {

// Pinhole camera, z forward, pixel origin at the top-left corner. The image
// rectangle is [0, image_w] x [0, image_h] in continuous pixel coordinates.
struct CameraIntrinsics {
  double fx = 0.0;  // px
  double fy = 0.0;  // px
  double cx = 0.0;  // px
  double cy = 0.0;  // px
  int image_w = 0;
  int image_h = 0;
};

// Throws BadValue naming the offending field (fx, fy must be > 0;
// image_w, image_h must be >= 1).
void validate_intrinsics(const CameraIntrinsics& k);

// u = fx*x/z + cx, v = fy*y/z + cy, returned as Point2{u, v}.
// Throws BehindCamera when z <= 0.
Point2 project_point(const CameraIntrinsics& k, const Vec3& p);

struct CubeProjection {
  std::array<Point2, 8> pixels{};  // pixels[i] meaningful only when valid[i]
  std::array<bool, 8> valid{};     // false where the camera-frame z <= 0
};

// Projects the posed cube vertex by vertex. Never throws for geometry:
// vertices behind the camera are masked invalid instead.
CubeProjection project_cube(const CameraIntrinsics& k, const Pose& pose,
                            const BoundingCube& cube);

enum class AuditReason { BehindCamera, OutOfFrame, TinyProjection };

std::string to_string(AuditReason reason);

struct AuditFlag {
  std::string image_id;
  std::string class_id;
  AuditReason reason = AuditReason::BehindCamera;
};

// Flags records whose ground-truth cube cannot plausibly be visible:
//   BehindCamera   all 8 posed vertices have z <= 0
//   OutOfFrame     the convex hull of the valid projections misses the
//                  image rectangle entirely
//   TinyProjection the hull area is below min_area_px
// Records are checked independently in input order; unflagged records
// produce no output. Pure function of its inputs.
std::vector<AuditFlag> frustum_audit(const std::vector<AnnotationRecord>& records,
                                     const CameraIntrinsics& k,
                                     double min_area_px = 25.0);

}  // namespace cubepose
