#include "cubepose/hull.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <unordered_map>

namespace cubepose {

namespace {

struct Face {
  std::array<int, 3> v;    // vertex indices, outward CCW
  std::array<int, 3> adj;  // face adjacent across edge (v[i], v[(i+1)%3])
  Vec3 n;                  // outward unit-ish normal
  double d = 0.0;          // plane n . x = d
  std::vector<int> outside;
  bool alive = true;
};

double signed_dist(const Face& f, const Vec3& p) { return dot(f.n, p) - f.d; }

}  // namespace

std::vector<std::size_t> convex_hull_vertices_3d(const PointSet& pts) {
  const int n = static_cast<int>(pts.size());
  if (n < 4) return {};

  Vec3 lo = pts[0], hi = pts[0];
  std::array<int, 6> extreme{};
  for (int i = 0; i < n; ++i) {
    const Vec3& p = pts[i];
    if (p.x < lo.x) { lo.x = p.x; extreme[0] = i; }
    if (p.y < lo.y) { lo.y = p.y; extreme[1] = i; }
    if (p.z < lo.z) { lo.z = p.z; extreme[2] = i; }
    if (p.x > hi.x) { hi.x = p.x; extreme[3] = i; }
    if (p.y > hi.y) { hi.y = p.y; extreme[4] = i; }
    if (p.z > hi.z) { hi.z = p.z; extreme[5] = i; }
  }
  const double scale = std::max({hi.x - lo.x, hi.y - lo.y, hi.z - lo.z,
                                 std::abs(lo.x), std::abs(lo.y), std::abs(lo.z),
                                 std::abs(hi.x), std::abs(hi.y), std::abs(hi.z), 1.0});
  const double eps = 1e-10 * scale;

  // Initial simplex: farthest extreme pair, then farthest from the line,
  // then farthest from the plane.
  int a = extreme[0], b = extreme[3];
  double best = -1.0;
  for (int i : extreme)
    for (int j : extreme) {
      const double d2 = squared_distance(pts[i], pts[j]);
      if (d2 > best) { best = d2; a = i; b = j; }
    }
  if (best <= eps * eps) return {};

  const Vec3 ab = pts[b] - pts[a];
  int c = -1;
  best = -1.0;
  for (int i = 0; i < n; ++i) {
    const double d2 = squared_norm(cross(ab, pts[i] - pts[a]));
    if (d2 > best) { best = d2; c = i; }
  }
  if (c < 0 || std::sqrt(best) / norm(ab) <= eps) return {};

  Vec3 pn = cross(ab, pts[c] - pts[a]);
  pn = pn / norm(pn);
  int d = -1;
  best = -1.0;
  for (int i = 0; i < n; ++i) {
    const double h = std::abs(dot(pn, pts[i] - pts[a]));
    if (h > best) { best = h; d = i; }
  }
  if (d < 0 || best <= eps) return {};  // coplanar input

  const Vec3 interior = (pts[a] + pts[b] + pts[c] + pts[d]) / 4.0;

  std::vector<Face> faces;
  auto make_face = [&](int i, int j, int k) {
    Face f;
    f.v = {i, j, k};
    Vec3 nrm = cross(pts[j] - pts[i], pts[k] - pts[i]);
    const double len = norm(nrm);
    if (len > 0.0) nrm = nrm / len;
    double off = dot(nrm, pts[i]);
    if (dot(nrm, interior) > off) {  // flip outward
      std::swap(f.v[1], f.v[2]);
      nrm = -nrm;
      off = dot(nrm, pts[f.v[0]]);
    }
    f.n = nrm;
    f.d = off;
    f.adj = {-1, -1, -1};
    return f;
  };

  faces.push_back(make_face(a, b, c));
  faces.push_back(make_face(a, b, d));
  faces.push_back(make_face(a, c, d));
  faces.push_back(make_face(b, c, d));

  auto link_all = [&](const std::vector<int>& ids) {
    for (std::size_t x = 0; x < ids.size(); ++x)
      for (int e = 0; e < 3; ++e) {
        Face& f = faces[ids[x]];
        const int u = f.v[e], w = f.v[(e + 1) % 3];
        for (std::size_t y = 0; y < ids.size(); ++y) {
          if (ids[x] == ids[y]) continue;
          const Face& g = faces[ids[y]];
          for (int e2 = 0; e2 < 3; ++e2)
            if (g.v[e2] == w && g.v[(e2 + 1) % 3] == u) f.adj[e] = ids[y];
        }
      }
  };
  link_all({0, 1, 2, 3});

  for (int i = 0; i < n; ++i) {
    double bd = eps;
    int bf = -1;
    for (int fi = 0; fi < 4; ++fi) {
      const double h = signed_dist(faces[fi], pts[i]);
      if (h > bd) { bd = h; bf = fi; }
    }
    if (bf >= 0) faces[bf].outside.push_back(i);
  }

  std::deque<int> pending = {0, 1, 2, 3};
  long steps = 0;
  const long max_steps = 64L * n + 1024;

  while (!pending.empty()) {
    if (++steps > max_steps) return {};  // bail; caller brute-forces
    const int fi = pending.front();
    pending.pop_front();
    Face& f = faces[fi];
    if (!f.alive || f.outside.empty()) continue;

    int apex = f.outside[0];
    double far = signed_dist(f, pts[apex]);
    for (int i : f.outside) {
      const double h = signed_dist(f, pts[i]);
      if (h > far) { far = h; apex = i; }
    }
    const Vec3& p = pts[apex];

    // Visible faces from the apex, by BFS over adjacency.
    std::vector<int> visible = {fi};
    std::vector<char> seen(faces.size(), 0);
    seen[fi] = 1;
    std::deque<int> queue = {fi};
    while (!queue.empty()) {
      const int gi = queue.front();
      queue.pop_front();
      for (int e = 0; e < 3; ++e) {
        const int ni = faces[gi].adj[e];
        if (ni < 0 || seen[ni] || !faces[ni].alive) continue;
        seen[ni] = 1;
        if (signed_dist(faces[ni], p) > eps) {
          visible.push_back(ni);
          queue.push_back(ni);
        }
      }
    }

    // Horizon: edges of visible faces whose neighbor stays.
    struct HorizonEdge { int u, w, neighbor, neighbor_edge; };
    std::vector<HorizonEdge> horizon;
    std::vector<char> is_visible(faces.size(), 0);
    for (int vi : visible) is_visible[vi] = 1;
    for (int vi : visible) {
      const Face& g = faces[vi];
      for (int e = 0; e < 3; ++e) {
        const int ni = g.adj[e];
        if (ni >= 0 && !is_visible[ni]) {
          int ne = -1;
          const int u = g.v[e], w = g.v[(e + 1) % 3];
          for (int e2 = 0; e2 < 3; ++e2)
            if (faces[ni].v[e2] == w && faces[ni].v[(e2 + 1) % 3] == u) ne = e2;
          horizon.push_back({u, w, ni, ne});
        }
      }
    }
    if (horizon.empty()) { f.outside.clear(); continue; }

    std::vector<int> orphan;
    for (int vi : visible) {
      Face& g = faces[vi];
      g.alive = false;
      for (int i : g.outside)
        if (i != apex) orphan.push_back(i);
      g.outside.clear();
    }

    auto edge_index = [&](const Face& g, int x, int y) {
      for (int e = 0; e < 3; ++e)
        if (g.v[e] == x && g.v[(e + 1) % 3] == y) return e;
      return -1;
    };

    std::vector<int> created;
    std::unordered_map<int, std::pair<int, int>> edge_start_to_face;  // u -> (face, w)
    for (const HorizonEdge& he : horizon) {
      const Face nf = make_face(he.u, he.w, apex);
      const int id = static_cast<int>(faces.size());
      faces.push_back(nf);
      const int e_uw = edge_index(faces[id], he.u, he.w);
      faces[id].adj[e_uw] = he.neighbor;
      faces[he.neighbor].adj[he.neighbor_edge] = id;
      created.push_back(id);
      edge_start_to_face[he.u] = {id, he.w};
    }
    // The horizon is a closed loop: each new face's (w, apex) edge meets the
    // (apex, u) edge of the face whose horizon edge starts at w.
    for (const HorizonEdge& he : horizon) {
      const int id = edge_start_to_face[he.u].first;
      const int next = edge_start_to_face[he.w].first;
      faces[id].adj[edge_index(faces[id], he.w, apex)] = next;
      faces[next].adj[edge_index(faces[next], apex, he.w)] = id;
    }

    for (int i : orphan) {
      double bd = eps;
      int bf = -1;
      for (int id : created) {
        const double h = signed_dist(faces[id], pts[i]);
        if (h > bd) { bd = h; bf = id; }
      }
      if (bf >= 0) faces[bf].outside.push_back(i);
    }
    for (int id : created)
      if (!faces[id].outside.empty()) pending.push_back(id);
  }

  std::vector<char> on_hull(n, 0);
  for (const Face& f : faces)
    if (f.alive)
      for (int vi : f.v) on_hull[vi] = 1;
  std::vector<std::size_t> out;
  for (int i = 0; i < n; ++i)
    if (on_hull[i]) out.push_back(static_cast<std::size_t>(i));
  return out;
}

namespace {

double cross2(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

}  // namespace

std::vector<Point2> convex_hull_2d(std::vector<Point2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Point2& a, const Point2& b) {
                          return a.x == b.x && a.y == b.y;
                        }),
            pts.end());
  const std::size_t n = pts.size();
  if (n < 3) return pts;

  std::vector<Point2> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {  // lower
    while (k >= 2 && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = n - 1; i-- > 0;) {  // upper
    while (k >= lower && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

double polygon_area(const std::vector<Point2>& poly) {
  if (poly.size() < 3) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point2& p = poly[i];
    const Point2& q = poly[(i + 1) % poly.size()];
    s += p.x * q.y - q.x * p.y;
  }
  return std::abs(s) * 0.5;
}

namespace {

bool point_in_rect(const Point2& p, double x0, double y0, double x1, double y1) {
  return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
}

bool point_in_convex(const std::vector<Point2>& poly, const Point2& p) {
  if (poly.size() < 3) return false;
  for (std::size_t i = 0; i < poly.size(); ++i)
    if (cross2(poly[i], poly[(i + 1) % poly.size()], p) < 0) return false;
  return true;
}

bool segments_intersect(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
  const double d1 = cross2(c, d, a);
  const double d2 = cross2(c, d, b);
  const double d3 = cross2(a, b, c);
  const double d4 = cross2(a, b, d);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  auto on_seg = [](const Point2& p, const Point2& q, const Point2& r) {
    return std::min(p.x, q.x) <= r.x && r.x <= std::max(p.x, q.x) &&
           std::min(p.y, q.y) <= r.y && r.y <= std::max(p.y, q.y);
  };
  if (d1 == 0 && on_seg(c, d, a)) return true;
  if (d2 == 0 && on_seg(c, d, b)) return true;
  if (d3 == 0 && on_seg(a, b, c)) return true;
  if (d4 == 0 && on_seg(a, b, d)) return true;
  return false;
}

}  // namespace

bool convex_polygon_intersects_rect(const std::vector<Point2>& poly,
                                    double x0, double y0, double x1, double y1) {
  if (poly.empty()) return false;
  for (const Point2& p : poly)
    if (point_in_rect(p, x0, y0, x1, y1)) return true;
  const std::array<Point2, 4> corners = {
      Point2{x0, y0}, Point2{x1, y0}, Point2{x1, y1}, Point2{x0, y1}};
  for (const Point2& c : corners)
    if (point_in_convex(poly, c)) return true;
  if (poly.size() >= 2) {
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Point2& a = poly[i];
      const Point2& b = poly[(i + 1) % poly.size()];
      for (int e = 0; e < 4; ++e)
        if (segments_intersect(a, b, corners[e], corners[(e + 1) % 4])) return true;
    }
  }
  return false;
}

}  // namespace cubepose
