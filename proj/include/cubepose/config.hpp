#pragma once

#include <cstdint>
#include <istream>
#include <set>
#include <string>

#include "cubepose/losses.hpp"
#include "cubepose/metrics.hpp"

namespace cubepose {

// Detection-head shape for a given scaling coefficient phi:
//   n_iter = 1 + floor(phi/3),  d_iter = d_rot = 2 + floor(phi/3).
// The scale head is an exact copy of the rotation head, hence d_rot.
struct SubnetShape {
  int n_iter = 0;
  int d_iter = 0;
  int d_rot = 0;
};

// Throws BadValue("phi") for negative phi.
SubnetShape subnet_shape(int phi);

struct ExperimentConfig {
  double k = 0.1;          // correctness threshold as a fraction of diameter
  double offset = 0.2;     // scale floor added to exp(raw)
  LossWeights weights;     // w_cube = 1, w_volume = 0.1, w_riou = 0
  ChamferDirection direction_eval = ChamferDirection::GtToPred;
  ChamferDirection direction_loss = ChamferDirection::PredToGt;
  std::set<std::string> symmetric_classes{"eggbox", "glue"};
  std::uint64_t seed = 0;
  double ply_scale = 1.0;    // multiplier applied to mesh vertices to reach mm
  double min_area_px = 25.0; // frustum-audit hull-area threshold
  int max_iters = 2000;      // pose-fit iteration budget
  double step_size = 1e-2;   // pose-fit initial step
};

// Flat `key = value` text, one pair per line, `#` starts a comment. Absent
// keys keep their defaults. Throws BadValue naming the offending key (or the
// line, for lines with no key) on unknown keys, duplicates, or bad values.
ExperimentConfig parse_config(std::istream& in);

// parse_config over the file's contents; MissingFile if it cannot be opened.
ExperimentConfig load_config(const std::string& path);

// Canonical text form: every key on its own `key = value` line, doubles in
// shortest round-trip form. parse_config(format_config(c)) == c exactly.
std::string format_config(const ExperimentConfig& cfg);

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

}  // namespace cubepose
