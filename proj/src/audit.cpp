#include "cubepose/audit.hpp"

#include "cubepose/errors.hpp"

namespace cubepose {

void validate_intrinsics(const CameraIntrinsics& k) {
  if (!(k.fx > 0.0)) throw BadValue("fx");
  if (!(k.fy > 0.0)) throw BadValue("fy");
  if (k.image_w < 1) throw BadValue("image_w");
  if (k.image_h < 1) throw BadValue("image_h");
}

Point2 project_point(const CameraIntrinsics& k, const Vec3& p) {
  validate_intrinsics(k);
  if (!(p.z > 0.0)) throw BehindCamera("projection requires z > 0");
  return Point2{k.fx * p.x / p.z + k.cx, k.fy * p.y / p.z + k.cy};
}

CubeProjection project_cube(const CameraIntrinsics& k, const Pose& pose,
                            const BoundingCube& cube) {
  validate_intrinsics(k);
  CubeProjection out;
  for (std::size_t i = 0; i < 8; ++i) {
    const Vec3 cam = apply_pose(pose, cube.vertices[i]);
    if (cam.z > 0.0) {
      out.pixels[i] = Point2{k.fx * cam.x / cam.z + k.cx, k.fy * cam.y / cam.z + k.cy};
      out.valid[i] = true;
    }
  }
  return out;
}

std::string to_string(AuditReason reason) {
  switch (reason) {
    case AuditReason::BehindCamera: return "BehindCamera";
    case AuditReason::OutOfFrame: return "OutOfFrame";
    case AuditReason::TinyProjection: return "TinyProjection";
  }
  return "Unknown";
}

std::vector<AuditFlag> frustum_audit(const std::vector<AnnotationRecord>& records,
                                     const CameraIntrinsics& k, double min_area_px) {
  validate_intrinsics(k);
  std::vector<AuditFlag> flags;
  for (const AnnotationRecord& rec : records) {
    const CubeProjection proj = project_cube(k, rec.pose, rec.cube);
    std::vector<Point2> seen;
    for (std::size_t i = 0; i < 8; ++i)
      if (proj.valid[i]) seen.push_back(proj.pixels[i]);
    if (seen.empty()) {
      flags.push_back({rec.image_id, rec.class_id, AuditReason::BehindCamera});
      continue;
    }
    const std::vector<Point2> hull = convex_hull_2d(seen);
    if (!convex_polygon_intersects_rect(hull, 0.0, 0.0,
                                        static_cast<double>(k.image_w),
                                        static_cast<double>(k.image_h))) {
      flags.push_back({rec.image_id, rec.class_id, AuditReason::OutOfFrame});
      continue;
    }
    if (polygon_area(hull) < min_area_px)
      flags.push_back({rec.image_id, rec.class_id, AuditReason::TinyProjection});
  }
  return flags;
}

}  // namespace cubepose
