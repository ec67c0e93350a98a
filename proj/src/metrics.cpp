#include "cubepose/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cubepose {

NnIndex::NnIndex(PointSet pts) : pts_(std::move(pts)) {
  if (pts_.empty()) throw EmptyPointSet("cannot index an empty point set");
  order_.resize(pts_.size());
  for (std::size_t i = 0; i < pts_.size(); ++i)
    order_[i] = static_cast<std::uint32_t>(i);
  nodes_.reserve(2 * pts_.size() / kLeafSize + 2);
  root_ = build(0, pts_.size());
}

int NnIndex::build(std::size_t begin, std::size_t end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({});
  nodes_[id].begin = static_cast<std::uint32_t>(begin);
  nodes_[id].end = static_cast<std::uint32_t>(end);
  if (end - begin <= kLeafSize) return id;

  Vec3 lo = pts_[order_[begin]], hi = lo;
  for (std::size_t i = begin; i < end; ++i) {
    const Vec3& p = pts_[order_[i]];
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
  }
  const Vec3 span = hi - lo;
  int axis = 0;
  if (span.y > span[static_cast<std::size_t>(axis)]) axis = 1;
  if (span.z > span[static_cast<std::size_t>(axis)]) axis = 2;
  if (span[static_cast<std::size_t>(axis)] == 0.0) return id;  // all coincident: leaf

  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid,
                   order_.begin() + end, [&](std::uint32_t a, std::uint32_t b) {
                     return pts_[a][static_cast<std::size_t>(axis)] <
                            pts_[b][static_cast<std::size_t>(axis)];
                   });
  nodes_[id].axis = axis;
  nodes_[id].split = pts_[order_[mid]][static_cast<std::size_t>(axis)];
  const int l = build(begin, mid);
  const int r = build(mid, end);
  nodes_[id].left = l;
  nodes_[id].right = r;
  return id;
}

void NnIndex::query(int node, const Vec3& q, double& best) const {
  const Node& n = nodes_[static_cast<std::size_t>(node)];
  if (n.left < 0) {
    for (std::uint32_t i = n.begin; i < n.end; ++i)
      best = std::min(best, squared_distance(q, pts_[order_[i]]));
    return;
  }
  const double diff = q[static_cast<std::size_t>(n.axis)] - n.split;
  const int near = diff < 0.0 ? n.left : n.right;
  const int far = diff < 0.0 ? n.right : n.left;
  query(near, q, best);
  if (diff * diff <= best) query(far, q, best);
}

double NnIndex::nearest_squared(const Vec3& q) const {
  double best = std::numeric_limits<double>::infinity();
  query(root_, q, best);
  return best;
}

MetricScore make_score(double error, double diameter, bool symmetric, double k) {
  return MetricScore{error, diameter, symmetric, error < k * diameter};
}

double mean_pointwise_distance(const PointSet& a, const PointSet& b) {
  if (a.empty()) throw EmptyPointSet("mean distance over an empty set");
  if (a.size() != b.size()) throw EmptyPointSet("point sets differ in length");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += distance(a[i], b[i]);
  return sum / static_cast<double>(a.size());
}

double directed_chamfer(const PointSet& outer, const PointSet& inner,
                        std::size_t bruteforce_max) {
  if (outer.empty() || inner.empty())
    throw EmptyPointSet("chamfer over an empty set");
  double sum = 0.0;
  if (inner.size() <= bruteforce_max) {
    for (const Vec3& q : outer) {
      double best = std::numeric_limits<double>::infinity();
      for (const Vec3& p : inner) best = std::min(best, squared_distance(q, p));
      sum += std::sqrt(best);
    }
  } else {
    const NnIndex index(inner);
    for (const Vec3& q : outer) sum += std::sqrt(index.nearest_squared(q));
  }
  return sum / static_cast<double>(outer.size());
}

double add_error(const Pose& pred, const Pose& gt, const PointSet& pts) {
  if (pts.empty()) throw EmptyPointSet("ADD over an empty point set");
  double sum = 0.0;
  for (const Vec3& x : pts)
    sum += distance(apply_pose(gt, x), apply_pose(pred, x));
  return sum / static_cast<double>(pts.size());
}

double add_s_error(const Pose& pred, const Pose& gt, const PointSet& pts,
                   ChamferDirection dir, std::size_t bruteforce_max) {
  if (pts.empty()) throw EmptyPointSet("ADD-S over an empty point set");
  const PointSet p = apply_pose(pred, pts);
  const PointSet g = apply_pose(gt, pts);
  if (dir == ChamferDirection::PredToGt)
    return directed_chamfer(p, g, bruteforce_max);
  return directed_chamfer(g, p, bruteforce_max);
}

double pose_error(const Pose& pred, const Pose& gt, const PointSet& pts,
                  bool symmetric, ChamferDirection dir,
                  std::size_t bruteforce_max) {
  if (symmetric) return add_s_error(pred, gt, pts, dir, bruteforce_max);
  return add_error(pred, gt, pts);
}

double threshold_accuracy(const std::vector<MetricScore>& scores, double k) {
  if (scores.empty()) throw EmptyInput("accuracy over an empty score list");
  if (k <= 0.0) throw BadValue("threshold fraction must be > 0");
  std::size_t hits = 0;
  for (const MetricScore& s : scores)
    if (s.error < k * s.diameter) ++hits;
  return static_cast<double>(hits) / static_cast<double>(scores.size());
}

}  // namespace cubepose
