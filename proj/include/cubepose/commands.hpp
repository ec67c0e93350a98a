#pragma once

#include <iosfwd>
#include <string>

#include "cubepose/audit.hpp"
#include "cubepose/optim.hpp"

namespace cubepose {

// Exit-code contract shared by every command.
inline constexpr int kExitSuccess = 0;
inline constexpr int kExitCheckFailure = 1;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitDiverged = 3;

// Flat `key = value` camera file with exactly the keys fx, fy, cx, cy,
// width, height. Throws BadValue naming the key that is missing, unknown,
// duplicated, or malformed.
CameraIntrinsics parse_intrinsics(std::istream& in);
CameraIntrinsics load_intrinsics(const std::string& path);

// Each command returns its process exit code and writes human-readable
// progress to `log`. An empty config path means "all defaults".

// Scores pred against gt, writes <out_dir>/report.csv.
int cmd_evaluate(const std::string& gt_path, const std::string& pred_path,
                 const std::string& config_path, const std::string& out_dir,
                 std::ostream& log);

// Fits pose + scale of the prior cube (first record of gt as the target),
// writes <out_dir>/fit_trace.csv and fit_trace.svg. The prior file is either
// a .ply mesh (cube from its axis-aligned bounds, vertices scaled by
// ply_scale) or a prior JSON as written by cmd_prior.
int cmd_fit(const std::string& prior_path, const std::string& gt_path,
            const std::string& config_path, const std::string& out_dir,
            bool init_from_gt, std::ostream& log);

// Runs the 100-instance analytic-vs-finite-difference comparison. Exit 0
// iff max rel err < 1e-5. `gradient` overrides the analytic gradient under
// test (used by the corrupted-gradient negative control).
int cmd_gradcheck(const std::string& config_path, std::ostream& log,
                  const GradientFn& gradient = {});

// Frustum/visibility audit of gt, writes <out_dir>/audit.csv. Exit 0 on any
// successful run, however many records are flagged.
int cmd_audit(const std::string& gt_path, const std::string& intrinsics_path,
              const std::string& config_path, const std::string& out_dir,
              std::ostream& log);

// Writes one prior JSON per class_id to out_dir. fixed_mm > 0 replaces the
// data average with a centered cube of that edge length; 0 means data-driven.
int cmd_prior(const std::string& gt_path, const std::string& out_dir,
              double fixed_mm, const std::string& config_path,
              std::ostream& log);

}  // namespace cubepose
