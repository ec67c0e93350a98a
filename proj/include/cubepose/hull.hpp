#pragma once

#include <cstddef>
#include <vector>

#include "cubepose/geometry.hpp"

namespace cubepose {

// Indices of the convex hull vertices of `pts` (quickhull). Returns an empty
// vector when the input is degenerate (rank < 3) or hull construction bails;
// callers fall back to the brute-force path in that case.
std::vector<std::size_t> convex_hull_vertices_3d(const PointSet& pts);

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

// Convex hull as a CCW polygon (monotone chain). Collinear points are
// dropped. Inputs with fewer than 3 distinct points come back as-is.
std::vector<Point2> convex_hull_2d(std::vector<Point2> pts);

// Shoelace area of a simple polygon (absolute value).
double polygon_area(const std::vector<Point2>& poly);

// Overlap test between a convex CCW polygon and the axis-aligned rectangle
// [x0,x1] x [y0,y1]. Touching counts as intersecting.
bool convex_polygon_intersects_rect(const std::vector<Point2>& poly,
                                    double x0, double y0, double x1, double y1);

}  // namespace cubepose
