#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cubepose/errors.hpp"
#include "cubepose/geometry.hpp"

namespace cubepose {

struct MeshModel {
  PointSet vertices;  // file units, passed through unchanged
  std::vector<std::vector<std::uint32_t>> faces;
};

// Supports format ascii/binary_little_endian 1.0, vertex x,y,z as
// float32/float64, unknown properties and elements skipped, faces kept.
MeshModel parse_ply(const std::string& bytes);

// Axis-aligned bounding cube of the mesh vertices.
BoundingCube mesh_cube(const MeshModel& m);

struct KittiAnnotation {
  std::string type;
  double truncated = 0.0;
  int occluded = 0;
  double alpha = 0.0;
  std::array<double, 4> bbox2d{};  // left, top, right, bottom (pixels)
  double h = 0.0, w = 0.0, l = 0.0;  // meters
  Vec3 location;                     // meters, camera frame
  double rotation_y = 0.0;           // radians about camera y
  std::optional<double> score;       // predictions only
  bool dont_care() const { return type == "DontCare"; }
};

// One 15-field label line; a 16th score field is accepted.
KittiAnnotation parse_kitti_label(const std::string& line);

// Inverse of parse_kitti_label up to float round-trip.
std::string format_kitti_label(const KittiAnnotation& a);

enum class Source { GroundTruth, Prediction };

struct AnnotationRecord {
  std::string image_id;
  std::string class_id;
  Pose pose;          // mm
  BoundingCube cube;  // object frame, mm
  bool symmetric = false;
  Source source = Source::GroundTruth;
};

// KITTI object frame: x spans the length, y the height (downward, so the box
// occupies [-h, 0]), z the width; bottom-center at the origin. Meters in,
// millimeters out.
AnnotationRecord kitti_to_record(const KittiAnnotation& a,
                                 const std::string& image_id,
                                 Source source = Source::GroundTruth);

// JSON Lines, one record per line:
// {"image_id": str, "class_id": str, "rotation": [9 row-major],
//  "translation_mm": [3], "cube_mm": [24], "symmetric": bool,
//  "source": "gt"|"pred"}
std::vector<AnnotationRecord> read_annotations(std::istream& in);
void write_annotations(const std::vector<AnnotationRecord>& records,
                       std::ostream& out);

struct ClassPrior {
  std::string class_id;
  BoundingCube prior_cube;
  double avg_diameter = 0.0;  // mm, diameter of the prior cube's vertices
};

// Average bounding cube: each cube is centered at its own centroid, then the
// componentwise min/max extents are averaged.
ClassPrior class_prior(const std::vector<BoundingCube>& cubes,
                       const std::string& class_id = "");

}  // namespace cubepose
