#include "cubepose/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "cubepose/hull.hpp"

namespace cubepose {

bool is_finite(const Vec3& v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

Mat3 mat3_identity() { return {1, 0, 0, 0, 1, 0, 0, 0, 1}; }

Mat3 mat3_mul(const Mat3& a, const Mat3& b) {
  Mat3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += a[i * 3 + k] * b[k * 3 + j];
      r[i * 3 + j] = s;
    }
  return r;
}

Mat3 mat3_transpose(const Mat3& m) {
  return {m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]};
}

Vec3 mat3_apply(const Mat3& m, const Vec3& v) {
  return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
          m[3] * v.x + m[4] * v.y + m[5] * v.z,
          m[6] * v.x + m[7] * v.y + m[8] * v.z};
}

Mat3 skew(const Vec3& v) {
  return {0, -v.z, v.y, v.z, 0, -v.x, -v.y, v.x, 0};
}

bool is_rotation_matrix(const Mat3& m, double tol) {
  const Mat3 mtm = mat3_mul(mat3_transpose(m), m);
  const Mat3 id = mat3_identity();
  for (int i = 0; i < 9; ++i)
    if (std::abs(mtm[i] - id[i]) > tol) return false;
  const double det = m[0] * (m[4] * m[8] - m[5] * m[7]) -
                     m[1] * (m[3] * m[8] - m[5] * m[6]) +
                     m[2] * (m[3] * m[7] - m[4] * m[6]);
  return std::abs(det - 1.0) <= tol;
}

Rotation Rotation::from_matrix(const Mat3& m) {
  if (!is_rotation_matrix(m)) throw NotARotation("matrix is not a proper rotation");
  return Rotation{m};
}

Rotation rotation_mul(const Rotation& a, const Rotation& b) {
  return Rotation{mat3_mul(a.m, b.m)};
}

Rotation rotation_transpose(const Rotation& r) {
  return Rotation{mat3_transpose(r.m)};
}

namespace {

// sin(t)/t and (1-cos t)/t^2 without cancellation; Taylor below 1e-7.
double sinc_theta(double t) {
  if (t < 1e-7) return 1.0 - t * t / 6.0;
  return std::sin(t) / t;
}

double one_minus_cos_over_t2(double t) {
  if (t < 1e-7) return 0.5 - t * t / 24.0;
  const double s = std::sin(0.5 * t);
  return 2.0 * s * s / (t * t);
}

double t_minus_sin_over_t3(double t) {
  if (t < 1e-7) return 1.0 / 6.0 - t * t / 120.0;
  return (t - std::sin(t)) / (t * t * t);
}

}  // namespace

Rotation axis_angle_to_rotation(const AxisAngle& aa) {
  const double theta = norm(aa.r);
  const double a = sinc_theta(theta);
  const double b = one_minus_cos_over_t2(theta);
  const Mat3 w = skew(aa.r);
  const Mat3 w2 = mat3_mul(w, w);
  Mat3 r = mat3_identity();
  for (int i = 0; i < 9; ++i) r[i] += a * w[i] + b * w2[i];
  return Rotation{r};
}

AxisAngle rotation_to_axis_angle(const Rotation& rot) {
  const Mat3& m = rot.m;
  if (!is_rotation_matrix(m)) throw NotARotation("matrix is not a proper rotation");

  const double trace = m[0] + m[4] + m[8];
  const double c = std::clamp((trace - 1.0) * 0.5, -1.0, 1.0);
  const double theta = std::acos(c);

  if (theta < 1e-10) return AxisAngle{};

  if (theta > kPi - 1e-6) {
    // Near pi the skew part vanishes; recover the axis from the symmetric
    // part. n_i^2 = (m_ii - c) / (1 - c), signs from the off-diagonals.
    const double d = 1.0 - c;
    const std::array<double, 3> diag = {m[0], m[4], m[8]};
    int k = 0;
    if (diag[1] > diag[k]) k = 1;
    if (diag[2] > diag[k]) k = 2;
    Vec3 n;
    const double nk = std::sqrt(std::max(0.0, (diag[k] - c) / d));
    n.at(k) = nk;
    if (nk > 0.0) {
      for (int j = 0; j < 3; ++j) {
        if (j == k) continue;
        n.at(j) = (m[k * 3 + j] + m[j * 3 + k]) / (2.0 * d * nk);
      }
    }
    const double len = norm(n);
    if (len > 0.0) n = n / len;
    // The symmetric part fixes the axis only up to sign. For theta < pi the
    // skew part is sin(theta) W(n) with sin(theta) > 0, so it resolves the
    // sign; at exactly pi it vanishes and either sign is correct.
    const Vec3 sk{m[7] - m[5], m[2] - m[6], m[3] - m[1]};
    if (dot(sk, n) < 0.0) n = -n;
    // acos is ill conditioned at -1; |skew|/2 = sin(theta) recovers the gap
    // to pi with full precision.
    const double refined = kPi - std::asin(std::clamp(0.5 * norm(sk), 0.0, 1.0));
    return AxisAngle{n * refined};
  }

  const double s = 2.0 * std::sin(theta);
  const Vec3 axis{(m[7] - m[5]) / s, (m[2] - m[6]) / s, (m[3] - m[1]) / s};
  return AxisAngle{axis * theta};
}

Mat3 so3_right_jacobian(const AxisAngle& aa) {
  const double theta = norm(aa.r);
  const double b = one_minus_cos_over_t2(theta);
  const double c = t_minus_sin_over_t3(theta);
  const Mat3 w = skew(aa.r);
  const Mat3 w2 = mat3_mul(w, w);
  Mat3 j = mat3_identity();
  for (int i = 0; i < 9; ++i) j[i] += -b * w[i] + c * w2[i];
  return j;
}

Vec3 apply_pose(const Pose& p, const Vec3& v) {
  return p.rotation.apply(v) + p.translation;
}

PointSet apply_pose(const Pose& p, const PointSet& pts) {
  PointSet out;
  out.reserve(pts.size());
  for (const Vec3& v : pts) out.push_back(apply_pose(p, v));
  return out;
}

Pose compose(const Pose& a, const Pose& b) {
  return Pose{rotation_mul(a.rotation, b.rotation),
              a.rotation.apply(b.translation) + a.translation};
}

Pose inverse(const Pose& p) {
  const Rotation rt = rotation_transpose(p.rotation);
  return Pose{rt, -rt.apply(p.translation)};
}

bool is_parallelepiped(const BoundingCube& cube, double tol) {
  const auto& v = cube.vertices;
  double scale = 1.0;
  for (const Vec3& p : v)
    scale = std::max({scale, std::abs(p.x), std::abs(p.y), std::abs(p.z)});
  const double eps = tol * scale;

  const Vec3 e1 = v[1] - v[0];
  const Vec3 e2 = v[3] - v[0];
  const Vec3 e3 = v[4] - v[0];
  for (std::size_t i = 0; i < 8; ++i) {
    const auto& k = kCubeVertexCoeffs[i];
    const Vec3 expect = v[0] + e1 * k[0] + e2 * k[1] + e3 * k[2];
    if (norm(v[i] - expect) > eps) return false;
  }
  return true;
}

Vec3 cube_centroid(const BoundingCube& cube) {
  Vec3 c;
  for (const Vec3& v : cube.vertices) c += v;
  return c / 8.0;
}

Vec3 cube_extents(const BoundingCube& cube) {
  Vec3 lo = cube.vertices[0], hi = cube.vertices[0];
  for (const Vec3& v : cube.vertices) {
    lo = {std::min(lo.x, v.x), std::min(lo.y, v.y), std::min(lo.z, v.z)};
    hi = {std::max(hi.x, v.x), std::max(hi.y, v.y), std::max(hi.z, v.z)};
  }
  return hi - lo;
}

PointSet cube_points(const BoundingCube& cube) {
  return PointSet(cube.vertices.begin(), cube.vertices.end());
}

BoundingCube cube_from_aabb(const Vec3& min, const Vec3& max) {
  if (min.x > max.x || min.y > max.y || min.z > max.z)
    throw InvalidExtents("aabb min exceeds max");
  // Sign pattern of the canonical order; + picks max, - picks min.
  constexpr int sx[8] = {1, 1, 1, 1, 0, 0, 0, 0};
  constexpr int sy[8] = {1, 0, 0, 1, 1, 0, 0, 1};
  constexpr int sz[8] = {1, 1, 0, 0, 1, 1, 0, 0};
  BoundingCube cube;
  for (int i = 0; i < 8; ++i)
    cube.vertices[i] = {sx[i] ? max.x : min.x, sy[i] ? max.y : min.y,
                        sz[i] ? max.z : min.z};
  return cube;
}

double volume(const BoundingCube& cube) {
  const auto& v = cube.vertices;
  const Vec3 e1 = v[1] - v[0];
  const Vec3 e2 = v[3] - v[0];
  const Vec3 e3 = v[4] - v[0];
  return std::abs(dot(e1, cross(e2, e3)));
}

Vec3 effective_scale(const ScaleParam& s) {
  return {std::exp(s.raw.x) + s.offset, std::exp(s.raw.y) + s.offset,
          std::exp(s.raw.z) + s.offset};
}

BoundingCube scale_cube(const BoundingCube& prior, const Vec3& scale) {
  if (scale.x <= 0.0 || scale.y <= 0.0 || scale.z <= 0.0)
    throw NonPositiveScale("scale components must be > 0");
  const Vec3 c = cube_centroid(prior);
  BoundingCube out;
  for (int i = 0; i < 8; ++i) {
    const Vec3 d = prior.vertices[i] - c;
    out.vertices[i] = c + Vec3{scale.x * d.x, scale.y * d.y, scale.z * d.z};
  }
  return out;
}

namespace {

double diameter_bruteforce(const PointSet& pts) {
  double best = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      best = std::max(best, squared_distance(pts[i], pts[j]));
  return std::sqrt(best);
}

}  // namespace

double diameter(const PointSet& pts, std::size_t bruteforce_max) {
  if (pts.size() < 2) throw TooFewPoints("diameter needs at least 2 points");
  if (pts.size() <= bruteforce_max) return diameter_bruteforce(pts);

  const std::vector<std::size_t> hull = convex_hull_vertices_3d(pts);
  if (hull.empty()) return diameter_bruteforce(pts);  // degenerate input

  double best = 0.0;
  for (std::size_t a = 0; a + 1 < hull.size(); ++a)
    for (std::size_t b = a + 1; b < hull.size(); ++b)
      best = std::max(best, squared_distance(pts[hull[a]], pts[hull[b]]));
  return std::sqrt(best);
}

}  // namespace cubepose
