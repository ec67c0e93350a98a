#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cubepose/losses.hpp"

namespace cubepose {

// Gradient layout: [aa.x, aa.y, aa.z, t.x, t.y, t.z, raw.x, raw.y, raw.z].
using Gradient9 = std::array<double, 9>;

struct FitConfig {
  int max_iters = 2000;
  double step_size = 1e-2;    // initial line-search step; adapts per iteration
  double converge_tol = 1e-6; // mm of loss change
  int converge_window = 20;   // consecutive flat iterations to declare done
  bool fit_rotation = true;
  bool fit_translation = true;
  bool fit_scale = false;
  std::uint64_t seed = 0;
  LossWeights weights;
  ChamferDirection loss_direction = ChamferDirection::PredToGt;
  bool symmetric = false;
  // When nonempty, each trace row also records the ADD(-S) of the current
  // pose against these points (the evaluation-direction chamfer).
  PointSet eval_points;
};

struct FitStep {
  int iter = 0;
  double loss = 0.0;  // mm
  double eval = 0.0;  // ADD(-S) vs eval_points; NaN when none were given
};

struct FitTrace {
  std::vector<FitStep> steps;  // step 0 is the initial point
  PoseScaleParams params;      // final (best) parameters
  double loss = 0.0;
  bool converged = false;
  int iterations = 0;  // accepted descent steps
};

// Gradient of combined_loss at `params`. Nearest-neighbor assignments of the
// chamfer branch and all min/max branches of the RIoU term are frozen at the
// current point, matching how the losses themselves evaluate.
Gradient9 loss_gradient(const PoseScaleParams& params, const BoundingCube& prior,
                        const Pose& gt_pose, const BoundingCube& gt_cube,
                        const LossWeights& weights, ChamferDirection dir,
                        bool symmetric);

// Central differences of an arbitrary scalar function of the parameters.
Gradient9 finite_difference_gradient(
    const std::function<double(const PoseScaleParams&)>& f,
    const PoseScaleParams& at, double h);

// Central differences of combined_loss.
Gradient9 finite_difference_gradient(const PoseScaleParams& params,
                                     const BoundingCube& prior,
                                     const Pose& gt_pose,
                                     const BoundingCube& gt_cube,
                                     const LossWeights& weights,
                                     ChamferDirection dir, bool symmetric,
                                     double h);

// Gradient descent with Armijo backtracking on combined_loss. The loss trace
// is monotone non-increasing. Throws Diverged if the loss or gradient stops
// being finite.
FitTrace fit_pose(const PoseScaleParams& init, const BoundingCube& prior,
                  const Pose& gt_pose, const BoundingCube& gt_cube,
                  const FitConfig& cfg);

// Ground truth composed with a random rotation of exactly `angle_rad` and a
// random translation of exactly `trans_mm`; scale raw chosen so the
// effective scale is 1.
PoseScaleParams perturb_pose(const Pose& gt, double angle_rad, double trans_mm,
                             std::mt19937_64& gen);

using GradientFn =
    std::function<Gradient9(const PoseScaleParams&, const BoundingCube&,
                            const Pose&, const BoundingCube&, const LossWeights&,
                            ChamferDirection, bool)>;

struct GradCheckReport {
  int n_instances = 0;
  double h = 0.0;
  double tol = 0.0;
  double max_rel_err = 0.0;
  int worst_instance = -1;
  std::uint64_t worst_seed = 0;
  bool pass = false;
  std::vector<double> rel_errs;  // per instance
  // Largest absolute component disagreement per instance at h and h/10,
  // for the step-size convergence study.
  std::vector<double> err_coarse;
  std::vector<double> err_fine;
};

// Compares `grad` (defaults to loss_gradient) against central finite
// differences on `n_instances` random smooth instances. Also records the
// disagreement at step h and h/10.
GradCheckReport run_gradient_check(int n_instances, double h, std::uint64_t seed,
                                   double tol, GradientFn grad = {});

struct SwapReport {
  int n_trials = 0;
  int n_correct = 0;
  double accuracy = 0.0;
  double threshold_mm = 0.0;           // k * diameter of the true model
  std::vector<double> errors;          // final ADD per trial, mm
  std::vector<int> iterations;         // accepted steps per trial
};

// Fits poses using only the surrogate cube in the loss, then scores each
// trial's ADD against the true model points at the 10%-of-diameter
// threshold. Perturbations: rotation angle uniform in [0, 40 deg], axis
// uniform; translation uniform in a ball of radius half the model diameter.
SwapReport model_swap_experiment(const PointSet& true_model,
                                 const BoundingCube& surrogate, int n_trials,
                                 const FitConfig& cfg);

struct CollapseRun {
  double volume_ratio = 0.0;  // fitted cube volume / prior volume
  double final_loss = 0.0;
  PoseScaleParams params;
};

struct CollapseReport {
  CollapseRun no_offset;    // symmetric chamfer loss, scale offset 0
  CollapseRun with_offset;  // same, offset 0.2
  CollapseRun control;      // asymmetric loss, all parameters free
};

// Reproduces the degenerate-scale failure mode: a symmetric object trained
// with the prediction-to-gt chamfer and a fixed 90-degree rotation mismatch
// about the cube's body diagonal shrinks its volume toward zero unless the
// scale offset keeps it off the floor. The asymmetric control fits cleanly.
CollapseReport collapse_experiment(const FitConfig& cfg);

}  // namespace cubepose
