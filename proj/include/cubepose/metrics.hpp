#pragma once

#include <cstdint>
#include <vector>

#include "cubepose/geometry.hpp"

namespace cubepose {

// Which set supplies the outer sum of the directed chamfer distance.
//   PredToGt: each prediction-transformed point to its nearest gt-transformed
//             point (the direction used inside the fitting loss).
//   GtToPred: each gt-transformed point to its nearest prediction-transformed
//             point (the evaluation default).
enum class ChamferDirection { PredToGt, GtToPred };

// Exact nearest-neighbor index (k-d tree, median split on the widest axis).
// No approximation: the squared distance returned is bit-identical to a
// brute-force scan because both use the same squared_distance kernel.
class NnIndex {
 public:
  explicit NnIndex(PointSet pts);  // throws EmptyPointSet

  double nearest_squared(const Vec3& q) const;
  std::size_t size() const { return pts_.size(); }

 private:
  struct Node {
    double split = 0.0;
    int axis = 0;
    int left = -1;
    int right = -1;
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
  };
  static constexpr std::size_t kLeafSize = 8;

  int build(std::size_t begin, std::size_t end);
  void query(int node, const Vec3& q, double& best) const;

  PointSet pts_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

struct MetricScore {
  double error = 0.0;     // mm
  double diameter = 0.0;  // mm
  bool symmetric = false;
  bool correct = false;  // error < k * diameter at the configured k
};

MetricScore make_score(double error, double diameter, bool symmetric, double k = 0.1);

// Mean distance between corresponding entries; the ADD kernel.
double mean_pointwise_distance(const PointSet& a, const PointSet& b);

// Mean distance from each `outer` point to its nearest `inner` point.
// Brute force up to `bruteforce_max` inner points, k-d tree above.
double directed_chamfer(const PointSet& outer, const PointSet& inner,
                        std::size_t bruteforce_max = 64);

// (1/m) sum ||(R_gt x + t_gt) - (R_pred x + t_pred)||. Symmetric in swap.
double add_error(const Pose& pred, const Pose& gt, const PointSet& pts);

// Directed chamfer between the two transformed copies of `pts`.
double add_s_error(const Pose& pred, const Pose& gt, const PointSet& pts,
                   ChamferDirection dir = ChamferDirection::GtToPred,
                   std::size_t bruteforce_max = 64);

// add_s_error when `symmetric`, add_error otherwise.
double pose_error(const Pose& pred, const Pose& gt, const PointSet& pts,
                  bool symmetric,
                  ChamferDirection dir = ChamferDirection::GtToPred,
                  std::size_t bruteforce_max = 64);

// Fraction of scores with error < k * diameter (strict).
double threshold_accuracy(const std::vector<MetricScore>& scores, double k = 0.1);

}  // namespace cubepose
