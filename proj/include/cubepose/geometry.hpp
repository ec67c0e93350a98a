#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "cubepose/errors.hpp"

namespace cubepose {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3() = default;
  constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }

  constexpr double operator[](std::size_t i) const { return i == 0 ? x : (i == 1 ? y : z); }
  double& at(std::size_t i) { return i == 0 ? x : (i == 1 ? y : z); }
};

inline constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }
inline constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline constexpr double squared_norm(const Vec3& v) { return dot(v, v); }
inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }
inline constexpr double squared_distance(const Vec3& a, const Vec3& b) { return squared_norm(a - b); }
bool is_finite(const Vec3& v);

// Arbitrary 3D point collection; mesh vertices or cube vertices. Millimeters.
using PointSet = std::vector<Vec3>;

// 3x3 row-major matrix.
using Mat3 = std::array<double, 9>;

Mat3 mat3_identity();
Mat3 mat3_mul(const Mat3& a, const Mat3& b);
Mat3 mat3_transpose(const Mat3& m);
Vec3 mat3_apply(const Mat3& m, const Vec3& v);
Mat3 skew(const Vec3& v);

// Proper rotation: orthonormal, det +1. Construct through from_matrix() to
// get the invariants checked; the raw field stays public for hot loops.
struct Rotation {
  Mat3 m = {1, 0, 0, 0, 1, 0, 0, 0, 1};

  static Rotation identity() { return {}; }
  static Rotation from_matrix(const Mat3& m);  // throws NotARotation

  Vec3 col(std::size_t c) const { return {m[c], m[3 + c], m[6 + c]}; }
  Vec3 apply(const Vec3& v) const { return mat3_apply(m, v); }
};

bool is_rotation_matrix(const Mat3& m, double tol = 1e-6);
Rotation rotation_mul(const Rotation& a, const Rotation& b);
Rotation rotation_transpose(const Rotation& r);

// Rotation vector: direction = axis, magnitude = angle in radians.
struct AxisAngle {
  Vec3 r;

  AxisAngle() = default;
  explicit AxisAngle(const Vec3& r_) : r(r_) {}
  AxisAngle(double x, double y, double z) : r(x, y, z) {}

  double angle() const { return norm(r); }
};

struct Pose {
  Rotation rotation;
  Vec3 translation;  // mm

  static Pose identity() { return {}; }
};

// Rodrigues. The zero vector maps to the identity.
Rotation axis_angle_to_rotation(const AxisAngle& aa);

// Canonical form: angle in [0, pi]. For angles at pi either sign of the
// axis may come back. Throws NotARotation if the matrix checks fail.
AxisAngle rotation_to_axis_angle(const Rotation& r);

// Right Jacobian of the exponential map: exp((r + d)^) ~ exp(r^) exp((Jr(r) d)^).
// Second-order Taylor below theta = 1e-7 avoids the 1/theta singularity.
Mat3 so3_right_jacobian(const AxisAngle& aa);

PointSet apply_pose(const Pose& p, const PointSet& pts);
Vec3 apply_pose(const Pose& p, const Vec3& v);
Pose compose(const Pose& a, const Pose& b);  // apply b first, then a
Pose inverse(const Pose& p);

// 8 ordered vertices in the object frame, millimeters. Vertex order is the
// front face clockwise (viewed from the front, +x forward, +y left, +z up),
// then the back face in the same clockwise order:
//   0:(+,+,+) 1:(+,-,+) 2:(+,-,-) 3:(+,+,-) 4:(-,+,+) 5:(-,-,+) 6:(-,-,-) 7:(-,+,-)
// The edges incident to vertex 0 are v1-v0, v3-v0, v4-v0; every vertex is
// v0 + a*(v1-v0) + b*(v3-v0) + c*(v4-v0) with a,b,c in {0,1}.
struct BoundingCube {
  std::array<Vec3, 8> vertices;
};

// Per-vertex (a, b, c) coefficients for the canonical order above.
inline constexpr std::array<std::array<int, 3>, 8> kCubeVertexCoeffs = {{
    {0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
    {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1},
}};

bool is_parallelepiped(const BoundingCube& cube, double tol = 1e-6);
Vec3 cube_centroid(const BoundingCube& cube);
// Axis-aligned extents (max - min per axis) of the cube's vertices.
Vec3 cube_extents(const BoundingCube& cube);
PointSet cube_points(const BoundingCube& cube);

// Throws InvalidExtents if min > max on any axis. min == max is a legal
// degenerate cube.
BoundingCube cube_from_aabb(const Vec3& min, const Vec3& max);

// |det [e1 e2 e3]| of the edge vectors at vertex 0, mm^3.
double volume(const BoundingCube& cube);

// Unconstrained 3-vector mapped to a positive per-axis scale via
// exp(raw) + offset; offset enforces the minimum scale (and so a minimum
// volume of offset^3 relative to the prior).
struct ScaleParam {
  Vec3 raw;
  double offset = 0.2;

  ScaleParam() = default;
  ScaleParam(const Vec3& raw_, double offset_) : raw(raw_), offset(offset_) {}
};

// Per-axis multipliers exp(raw_i) + offset, each strictly > offset.
Vec3 effective_scale(const ScaleParam& s);

// Per-axis scaling about the cube's centroid, axes of the object frame.
// Vertex order is preserved. Throws NonPositiveScale.
BoundingCube scale_cube(const BoundingCube& prior, const Vec3& scale);

// Maximum pairwise distance. Exact O(m^2) up to `bruteforce_max` points;
// larger sets are reduced to their convex hull vertices first (still exact).
// Throws TooFewPoints for m < 2.
double diameter(const PointSet& pts, std::size_t bruteforce_max = 20000);

}  // namespace cubepose
