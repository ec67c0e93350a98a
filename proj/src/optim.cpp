#include "cubepose/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cubepose/dual.hpp"
#include "cubepose/riou_kernel.hpp"
#include "cubepose/rng.hpp"

namespace cubepose {

namespace {

Vec3 mat3_apply_transposed(const Mat3& m, const Vec3& v) {
  return mat3_apply(mat3_transpose(m), v);
}

}  // namespace

Gradient9 loss_gradient(const PoseScaleParams& params, const BoundingCube& prior,
                        const Pose& gt_pose, const BoundingCube& gt_cube,
                        const LossWeights& weights, ChamferDirection dir,
                        bool symmetric) {
  if (weights.w_cube < 0.0 || weights.w_volume < 0.0 || weights.w_riou < 0.0)
    throw BadValue("loss weights must be >= 0");
  if (weights.w_cube <= 0.0 && weights.w_volume <= 0.0 && weights.w_riou <= 0.0)
    throw BadValue("at least one loss weight must be > 0");

  const Rotation rot = axis_angle_to_rotation(params.aa);
  const Mat3 jr = so3_right_jacobian(params.aa);
  const Mat3 jr_t = mat3_transpose(jr);
  const Vec3 eff = effective_scale(params.s);
  const Vec3 exp_raw{std::exp(params.s.raw.x), std::exp(params.s.raw.y),
                     std::exp(params.s.raw.z)};
  const Vec3 centroid = cube_centroid(prior);

  std::array<Vec3, 8> prior_off;
  std::array<Vec3, 8> scaled;  // object frame
  std::array<Vec3, 8> pred;    // world frame
  std::array<Vec3, 8> gt;      // world frame
  for (std::size_t i = 0; i < 8; ++i) {
    prior_off[i] = prior.vertices[i] - centroid;
    scaled[i] = centroid + Vec3{eff.x * prior_off[i].x, eff.y * prior_off[i].y,
                                eff.z * prior_off[i].z};
    pred[i] = rot.apply(scaled[i]) + params.t;
    gt[i] = apply_pose(gt_pose, gt_cube.vertices[i]);
  }

  Vec3 g_aa, g_t, g_raw;

  if (weights.w_cube > 0.0) {
    auto add_pair = [&](std::size_t pi, std::size_t gi) {
      const Vec3 d = pred[pi] - gt[gi];
      const double len = norm(d);
      if (len == 0.0) return;  // subgradient 0 at the kink
      const Vec3 n = d / len;
      g_t += n;
      const Vec3 rn = mat3_apply_transposed(rot.m, n);
      g_aa += mat3_apply(jr_t, cross(scaled[pi], rn));
      g_raw += Vec3{dot(n, rot.col(0)) * prior_off[pi].x * exp_raw.x,
                    dot(n, rot.col(1)) * prior_off[pi].y * exp_raw.y,
                    dot(n, rot.col(2)) * prior_off[pi].z * exp_raw.z};
    };

    if (!symmetric) {
      for (std::size_t i = 0; i < 8; ++i) add_pair(i, i);
    } else if (dir == ChamferDirection::PredToGt) {
      for (std::size_t i = 0; i < 8; ++i) {
        std::size_t best = 0;
        double bd = squared_distance(pred[i], gt[0]);
        for (std::size_t j = 1; j < 8; ++j) {
          const double d2 = squared_distance(pred[i], gt[j]);
          if (d2 < bd) { bd = d2; best = j; }
        }
        add_pair(i, best);
      }
    } else {
      for (std::size_t j = 0; j < 8; ++j) {
        std::size_t best = 0;
        double bd = squared_distance(pred[0], gt[j]);
        for (std::size_t i = 1; i < 8; ++i) {
          const double d2 = squared_distance(pred[i], gt[j]);
          if (d2 < bd) { bd = d2; best = i; }
        }
        add_pair(best, j);
      }
    }
    const double wc = weights.w_cube / 8.0;
    g_aa = g_aa * wc;
    g_t = g_t * wc;
    g_raw = g_raw * wc;
  }

  if (weights.w_volume > 0.0) {
    constexpr double kEps = 1.0;  // mm^3
    const double vg = volume(gt_cube);
    const double vs = volume(prior) * eff.x * eff.y * eff.z;
    const double sign = vs > vg ? 1.0 : (vs < vg ? -1.0 : 0.0);
    const double f = weights.w_volume * sign / std::max(vg, kEps);
    g_raw += Vec3{f * vs * exp_raw.x / eff.x, f * vs * exp_raw.y / eff.y,
                  f * vs * exp_raw.z / eff.z};
  }

  if (weights.w_riou > 0.0) {
    const BevBox gbev = bev_footprint(gt_cube, gt_pose);
    const Vec3 ext = cube_extents(prior);
    const double yaw = std::atan2(rot.m[3], rot.m[0]);
    const Vec3 center = rot.apply(centroid) + params.t;

    using D5 = Dual<5>;  // partials wrt (l, w, r, cx, cy) of the predicted box
    const detail::BevBoxT<D5> gd{D5(gbev.l), D5(gbev.w), D5(gbev.r),
                                 D5(gbev.cx), D5(gbev.cy)};
    const detail::BevBoxT<D5> pd{D5::seed(eff.x * ext.x, 0),
                                 D5::seed(eff.y * ext.y, 1), D5::seed(yaw, 2),
                                 D5::seed(center.x, 3), D5::seed(center.y, 4)};
    const D5 r = detail::riou_kernel(gd, pd);

    // Chain the five box partials back to the nine parameters. The combined
    // term is w_riou * (1 - riou), hence the negation.
    const double dl = -weights.w_riou * r.d[0];
    const double dw = -weights.w_riou * r.d[1];
    const double dr = -weights.w_riou * r.d[2];
    const double dcx = -weights.w_riou * r.d[3];
    const double dcy = -weights.w_riou * r.d[4];

    g_raw.x += dl * exp_raw.x * ext.x;
    g_raw.y += dw * exp_raw.y * ext.y;

    const double a = rot.m[0], b = rot.m[3];
    const double q = a * a + b * b;
    Vec3 du;  // d(term)/d(u), u the body-frame rotation increment
    if (q > 1e-30) {
      du += Vec3{0.0, (b * rot.m[2] - a * rot.m[5]) / q,
                 (a * rot.m[4] - b * rot.m[1]) / q} *
            dr;
    }
    // center = R centroid + t: d(center)/du = -R skew(centroid).
    const Mat3 rskew = mat3_mul(rot.m, skew(centroid));
    du += Vec3{-rskew[0], -rskew[1], -rskew[2]} * dcx;
    du += Vec3{-rskew[3], -rskew[4], -rskew[5]} * dcy;
    g_aa += mat3_apply(jr_t, du);

    g_t += Vec3{dcx, dcy, 0.0};
  }

  return {g_aa.x, g_aa.y, g_aa.z, g_t.x, g_t.y, g_t.z, g_raw.x, g_raw.y, g_raw.z};
}

Gradient9 finite_difference_gradient(
    const std::function<double(const PoseScaleParams&)>& f,
    const PoseScaleParams& at, double h) {
  if (h <= 0.0) throw BadValue("finite-difference step must be > 0");
  Gradient9 g{};
  for (int k = 0; k < 9; ++k) {
    PoseScaleParams hi = at, lo = at;
    double* hp = nullptr;
    double* lp = nullptr;
    if (k < 3) {
      hp = &hi.aa.r.at(static_cast<std::size_t>(k));
      lp = &lo.aa.r.at(static_cast<std::size_t>(k));
    } else if (k < 6) {
      hp = &hi.t.at(static_cast<std::size_t>(k - 3));
      lp = &lo.t.at(static_cast<std::size_t>(k - 3));
    } else {
      hp = &hi.s.raw.at(static_cast<std::size_t>(k - 6));
      lp = &lo.s.raw.at(static_cast<std::size_t>(k - 6));
    }
    *hp += h;
    *lp -= h;
    g[static_cast<std::size_t>(k)] = (f(hi) - f(lo)) / (2.0 * h);
  }
  return g;
}

Gradient9 finite_difference_gradient(const PoseScaleParams& params,
                                     const BoundingCube& prior,
                                     const Pose& gt_pose,
                                     const BoundingCube& gt_cube,
                                     const LossWeights& weights,
                                     ChamferDirection dir, bool symmetric,
                                     double h) {
  return finite_difference_gradient(
      [&](const PoseScaleParams& p) {
        return combined_loss(p, prior, gt_pose, gt_cube, weights, dir, symmetric);
      },
      params, h);
}

namespace {

bool all_finite(const Gradient9& g) {
  for (const double v : g)
    if (!std::isfinite(v)) return false;
  return true;
}

double trace_eval(const PoseScaleParams& params, const Pose& gt_pose,
                  const FitConfig& cfg) {
  if (cfg.eval_points.empty()) return std::numeric_limits<double>::quiet_NaN();
  return pose_error(params.pose(), gt_pose, cfg.eval_points, cfg.symmetric);
}

}  // namespace

FitTrace fit_pose(const PoseScaleParams& init, const BoundingCube& prior,
                  const Pose& gt_pose, const BoundingCube& gt_cube,
                  const FitConfig& cfg) {
  if (cfg.max_iters < 1) throw BadValue("max_iters must be >= 1");
  if (cfg.step_size <= 0.0) throw BadValue("step_size must be > 0");

  const auto f = [&](const PoseScaleParams& p) {
    return combined_loss(p, prior, gt_pose, gt_cube, cfg.weights,
                         cfg.loss_direction, cfg.symmetric);
  };

  // Block preconditioner: translation lives in mm while rotation and scale
  // are order-one, so give the translation block the square of the prior's
  // size to keep one shared step length meaningful.
  double d_prior = 1.0;
  try {
    d_prior = std::max(1.0, diameter(cube_points(prior)));
  } catch (const TooFewPoints&) {
  }
  const double p_t = d_prior * d_prior;

  FitTrace trace;
  PoseScaleParams params = init;
  double loss = f(params);
  if (!std::isfinite(loss)) throw Diverged("initial loss is not finite");
  trace.steps.push_back({0, loss, trace_eval(params, gt_pose, cfg)});

  double alpha = cfg.step_size;
  int flat = 0;

  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    Gradient9 g = loss_gradient(params, prior, gt_pose, gt_cube, cfg.weights,
                                cfg.loss_direction, cfg.symmetric);
    if (!all_finite(g)) throw Diverged("gradient is not finite");
    if (!cfg.fit_rotation) g[0] = g[1] = g[2] = 0.0;
    if (!cfg.fit_translation) g[3] = g[4] = g[5] = 0.0;
    if (!cfg.fit_scale) g[6] = g[7] = g[8] = 0.0;

    double decrement = 0.0;  // g^T P g
    for (int k = 0; k < 9; ++k) {
      const double pk = (k >= 3 && k < 6) ? p_t : 1.0;
      decrement += g[static_cast<std::size_t>(k)] * pk * g[static_cast<std::size_t>(k)];
    }
    if (decrement == 0.0) {
      trace.converged = true;
      break;
    }

    bool accepted = false;
    double a = alpha;
    PoseScaleParams candidate;
    double cand_loss = 0.0;
    for (int back = 0; back < 60; ++back) {
      candidate = params;
      candidate.aa.r -= Vec3{g[0], g[1], g[2]} * a;
      candidate.t -= Vec3{g[3], g[4], g[5]} * (a * p_t);
      candidate.s.raw -= Vec3{g[6], g[7], g[8]} * a;
      cand_loss = f(candidate);
      if (std::isfinite(cand_loss) && cand_loss <= loss - 1e-4 * a * decrement) {
        accepted = true;
        break;
      }
      a *= 0.5;
    }
    if (!accepted) {
      trace.converged = true;  // no descent step exists at resolvable scale
      break;
    }

    const double drop = loss - cand_loss;
    params = candidate;
    loss = cand_loss;
    trace.iterations = iter;
    trace.steps.push_back({iter, loss, trace_eval(params, gt_pose, cfg)});
    alpha = std::min(a * 4.0, 1e12);

    if (drop < cfg.converge_tol) {
      if (++flat >= cfg.converge_window) {
        trace.converged = true;
        break;
      }
    } else {
      flat = 0;
    }
  }

  trace.params = params;
  trace.loss = loss;
  return trace;
}

PoseScaleParams perturb_pose(const Pose& gt, double angle_rad, double trans_mm,
                             std::mt19937_64& gen) {
  const Vec3 axis = uniform_unit_vector(gen);
  const Vec3 dir = uniform_unit_vector(gen);
  const Rotation delta = axis_angle_to_rotation(AxisAngle{axis * angle_rad});
  PoseScaleParams out;
  out.aa = rotation_to_axis_angle(rotation_mul(delta, gt.rotation));
  out.t = gt.translation + dir * trans_mm;
  const double raw = std::log(1.0 - out.s.offset);
  out.s.raw = {raw, raw, raw};  // effective scale 1
  return out;
}

SwapReport model_swap_experiment(const PointSet& true_model,
                                 const BoundingCube& surrogate, int n_trials,
                                 const FitConfig& cfg) {
  if (n_trials < 1) throw BadValue("n_trials must be >= 1");
  if (true_model.size() < 2) throw TooFewPoints("true model needs >= 2 points");

  const double d = diameter(true_model);
  SwapReport report;
  report.n_trials = n_trials;
  report.threshold_mm = 0.1 * d;

  for (int trial = 0; trial < n_trials; ++trial) {
    std::mt19937_64 gen(splitmix64(cfg.seed ^ (0x5157ULL + static_cast<std::uint64_t>(trial))));
    const Pose gt{random_rotation(gen),
                  uniform_in_box(gen, {-500, -500, -500}, {500, 500, 500})};
    const double angle = uniform_range(gen, 0.0, 40.0 * kPi / 180.0);
    const Vec3 toff = uniform_in_ball(gen, 0.5 * d);
    PoseScaleParams init = perturb_pose(gt, angle, 0.0, gen);
    init.t = gt.translation + toff;

    FitConfig run = cfg;
    run.fit_scale = false;
    run.eval_points.clear();
    const FitTrace trace = fit_pose(init, surrogate, gt, surrogate, run);

    const double err = add_error(trace.params.pose(), gt, true_model);
    report.errors.push_back(err);
    report.iterations.push_back(trace.iterations);
    if (err < report.threshold_mm) ++report.n_correct;
  }
  report.accuracy =
      static_cast<double>(report.n_correct) / static_cast<double>(report.n_trials);
  return report;
}

namespace {

CollapseRun best_collapse_run(const BoundingCube& prior, const Pose& gt,
                              const Rotation& mismatch, double offset,
                              const FitConfig& base, std::uint64_t salt) {
  // The balanced center start can sit on a saddle of the chamfer surface, so
  // run a deterministic multi-start over translation inits and keep the run
  // the optimizer liked best, the way stochastic training would settle.
  const double d = diameter(cube_points(prior));
  CollapseRun best;
  best.final_loss = std::numeric_limits<double>::infinity();

  for (int start = 0; start < 8; ++start) {
    std::mt19937_64 gen(splitmix64(base.seed ^ (salt + static_cast<std::uint64_t>(start))));
    PoseScaleParams init;
    init.aa = rotation_to_axis_angle(mismatch);
    init.s.offset = offset;
    // Explore starting size as well as position: the full-size centered
    // guess sits in a local minimum, and only starts that are both somewhat
    // off-center and somewhat shrunk roll into the collapse valley.
    static constexpr double kStartEff[3] = {1.0, 0.5, 0.25};
    const double eff0 = start == 0 ? 1.0 : kStartEff[start % 3];
    const double raw = eff0 > offset ? std::log(eff0 - offset) : -30.0;
    init.s.raw = {raw, raw, raw};
    init.t = start == 0 ? gt.translation
                        : gt.translation + uniform_in_ball(gen, 0.5 * d);

    FitConfig run = base;
    run.fit_rotation = false;  // the mismatch is held fixed
    run.fit_translation = true;
    run.fit_scale = true;
    run.symmetric = true;
    run.loss_direction = ChamferDirection::PredToGt;
    run.weights = LossWeights{1.0, 0.0, 0.0};
    run.eval_points.clear();

    const FitTrace trace = fit_pose(init, prior, gt, prior, run);
    if (trace.loss < best.final_loss) {
      best.final_loss = trace.loss;
      best.params = trace.params;
      best.volume_ratio = volume(predicted_cube(trace.params, prior)) / volume(prior);
    }
  }
  return best;
}

}  // namespace

CollapseReport collapse_experiment(const FitConfig& cfg) {
  const BoundingCube prior = cube_from_aabb({-50, -50, -50}, {50, 50, 50});
  const Pose gt = Pose::identity();
  const double inv = 1.0 / std::sqrt(3.0);
  // 90 degrees about the body diagonal: not a symmetry of the cube and not
  // absorbable by any per-axis rescale, so the full-size chamfer stays
  // positive and the collapse shortcut pays off.
  const Rotation mismatch =
      axis_angle_to_rotation(AxisAngle{Vec3{inv, inv, inv} * (kPi / 2.0)});

  CollapseReport report;
  report.no_offset = best_collapse_run(prior, gt, mismatch, 0.0, cfg, 0x0ffULL);
  report.with_offset = best_collapse_run(prior, gt, mismatch, 0.2, cfg, 0x2bbULL);

  // Control: an asymmetric object under the index-matched loss, everything
  // free, moderate init error. No shortcut exists; scale settles near 1.
  std::mt19937_64 gen(splitmix64(cfg.seed ^ 0xc0117ULL));
  const double d = diameter(cube_points(prior));
  PoseScaleParams init = perturb_pose(gt, 20.0 * kPi / 180.0, 0.3 * d, gen);

  FitConfig run = cfg;
  run.fit_rotation = true;
  run.fit_translation = true;
  run.fit_scale = true;
  run.symmetric = false;
  run.weights = LossWeights{1.0, 0.0, 0.0};
  run.eval_points.clear();

  const FitTrace trace = fit_pose(init, prior, gt, prior, run);
  report.control.final_loss = trace.loss;
  report.control.params = trace.params;
  report.control.volume_ratio =
      volume(predicted_cube(trace.params, prior)) / volume(prior);
  return report;
}

namespace {

struct GradCheckInstance {
  PoseScaleParams params;
  BoundingCube prior;
  Pose gt_pose;
  BoundingCube gt_cube;
  LossWeights weights;
  ChamferDirection dir = ChamferDirection::PredToGt;
  bool symmetric = false;
};

GradCheckInstance random_smooth_instance(std::uint64_t seed, int index) {
  std::mt19937_64 gen(seed);
  GradCheckInstance inst;

  const Vec3 half{uniform_range(gen, 25, 100), uniform_range(gen, 25, 100),
                  uniform_range(gen, 25, 100)};
  inst.prior = cube_from_aabb(-half, half);
  const Vec3 ghalf{uniform_range(gen, 25, 100), uniform_range(gen, 25, 100),
                   uniform_range(gen, 25, 100)};
  inst.gt_cube = cube_from_aabb(-ghalf, ghalf);

  // Keep rotation angles away from 0 and pi where the axis-angle chart has
  // removable singularities that finite differences straddle badly.
  inst.gt_pose.rotation =
      axis_angle_to_rotation(AxisAngle{uniform_unit_vector(gen) * uniform_range(gen, 0.3, 2.5)});
  inst.gt_pose.translation = uniform_in_box(gen, {-200, -200, -200}, {200, 200, 200});

  inst.params.aa = AxisAngle{uniform_unit_vector(gen) * uniform_range(gen, 0.3, 2.5)};
  inst.params.t = uniform_in_box(gen, {-200, -200, -200}, {200, 200, 200});
  inst.params.s.raw = uniform_in_box(gen, {-0.4, -0.4, -0.4}, {0.4, 0.4, 0.4});
  inst.params.s.offset = 0.2;

  switch (index % 3) {
    case 0: inst.weights = LossWeights{1.0, 0.0, 0.0}; break;
    case 1: inst.weights = LossWeights{1.0, 0.1, 0.0}; break;
    default: inst.weights = LossWeights{1.0, 0.1, 0.5}; break;
  }
  inst.symmetric = (index % 2) == 1;
  inst.dir = (index % 4) < 2 ? ChamferDirection::PredToGt
                             : ChamferDirection::GtToPred;
  return inst;
}

double max_abs_diff(const Gradient9& a, const Gradient9& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < 9; ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

}  // namespace

GradCheckReport run_gradient_check(int n_instances, double h, std::uint64_t seed,
                                   double tol, GradientFn grad) {
  if (n_instances < 1) throw BadValue("n_instances must be >= 1");
  if (h <= 0.0) throw BadValue("finite-difference step must be > 0");
  if (!grad)
    grad = [](const PoseScaleParams& p, const BoundingCube& prior,
              const Pose& gt_pose, const BoundingCube& gt_cube,
              const LossWeights& w, ChamferDirection d, bool sym) {
      return loss_gradient(p, prior, gt_pose, gt_cube, w, d, sym);
    };

  GradCheckReport report;
  report.n_instances = n_instances;
  report.h = h;
  report.tol = tol;

  for (int i = 0; i < n_instances; ++i) {
    const std::uint64_t inst_seed = splitmix64(seed ^ (0x9c0deULL + static_cast<std::uint64_t>(i)));
    const GradCheckInstance inst = random_smooth_instance(inst_seed, i);

    const Gradient9 analytic = grad(inst.params, inst.prior, inst.gt_pose,
                                    inst.gt_cube, inst.weights, inst.dir,
                                    inst.symmetric);
    const Gradient9 fd =
        finite_difference_gradient(inst.params, inst.prior, inst.gt_pose,
                                   inst.gt_cube, inst.weights, inst.dir,
                                   inst.symmetric, h);
    const Gradient9 fd_coarse =
        finite_difference_gradient(inst.params, inst.prior, inst.gt_pose,
                                   inst.gt_cube, inst.weights, inst.dir,
                                   inst.symmetric, h * 10.0);

    // Relative above 1, absolute below: the finite-difference oracle itself
    // carries ~1e-8 of roundoff, so a tiny component must not inflate the
    // ratio. Gradient components here are O(0.1)..O(100).
    double rel = 0.0;
    for (std::size_t k = 0; k < 9; ++k) {
      const double denom = std::max(std::abs(fd[k]), 1.0);
      rel = std::max(rel, std::abs(analytic[k] - fd[k]) / denom);
    }

    report.rel_errs.push_back(rel);
    report.err_fine.push_back(max_abs_diff(analytic, fd));
    report.err_coarse.push_back(max_abs_diff(analytic, fd_coarse));
    if (rel > report.max_rel_err) {
      report.max_rel_err = rel;
      report.worst_instance = i;
      report.worst_seed = inst_seed;
    }
  }
  report.pass = report.max_rel_err < tol;
  return report;
}

}  // namespace cubepose
