// Acceptance gate: every release-blocking property in one binary. Each
// criterion prints exactly one PASS/FAIL line; the exit code is 0 only when
// all twelve hold. Oracles here are written independently of the library
// internals they judge.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cubepose/audit.hpp"
#include "cubepose/commands.hpp"
#include "cubepose/config.hpp"
#include "cubepose/ingest.hpp"
#include "cubepose/losses.hpp"
#include "cubepose/metrics.hpp"
#include "cubepose/optim.hpp"
#include "cubepose/rng.hpp"

namespace fs = std::filesystem;
using namespace cubepose;

namespace {

void require(bool cond, const std::string& what) {
  if (!cond) throw std::runtime_error(what);
}

std::string fixture(const std::string& name) {
  return std::string(FIXTURE_DIR) + "/" + name;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  require(in.good(), "cannot open " + p.string());
  std::ostringstream body;
  body << in.rdbuf();
  return body.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("cubepose_acceptance_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

BoundingCube box(double hx, double hy, double hz) {
  return cube_from_aabb({-hx, -hy, -hz}, {hx, hy, hz});
}

PointSet random_points(std::mt19937_64& gen, std::size_t m, const Vec3& half) {
  PointSet pts;
  pts.reserve(m);
  for (std::size_t i = 0; i < m; ++i) pts.push_back(uniform_in_box(gen, -half, half));
  return pts;
}

Pose random_pose(std::mt19937_64& gen, double trans_range) {
  return Pose{random_rotation(gen),
              uniform_in_box(gen, Vec3{-trans_range, -trans_range, -trans_range},
                             Vec3{trans_range, trans_range, trans_range})};
}

// O(m^2) directed chamfer written from the definition; the oracle for the
// accelerated nearest-neighbor path.
double brute_force_chamfer(const PointSet& outer, const PointSet& inner) {
  double sum = 0.0;
  for (const Vec3& a : outer) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec3& b : inner) {
      const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
      const double d2 = dx * dx + dy * dy + dz * dz;
      if (d2 < best) best = d2;
    }
    sum += std::sqrt(best);
  }
  return sum / static_cast<double>(outer.size());
}

// 1. add_error(p,p)=0; pure translation gives ||dt||; the half-turn unit cube
//    gives sqrt(2) under ADD and 0 under ADD-S. Tolerance 1e-9.
void metric_identities() {
  std::mt19937_64 gen(splitmix64(101));
  const PointSet pts = cube_points(box(40, 25, 60));
  const Pose p{random_rotation(gen), Vec3{12, -7, 950}};
  require(add_error(p, p, pts) <= 1e-9, "add_error(p,p) not 0");

  const Vec3 dt{3.5, -1.25, 9.75};
  const Pose q{p.rotation, p.translation + dt};
  require(std::abs(add_error(q, p, pts) - norm(dt)) <= 1e-9,
          "pure translation is not ||dt||");

  const PointSet unit = cube_points(box(0.5, 0.5, 0.5));
  const Pose half{axis_angle_to_rotation(AxisAngle{0, 0, kPi}), Vec3{}};
  require(std::abs(add_error(half, Pose::identity(), unit) - std::sqrt(2.0)) <= 1e-9,
          "half-turn ADD is not sqrt(2)");
  require(add_s_error(half, Pose::identity(), unit, ChamferDirection::GtToPred) <= 1e-9,
          "half-turn ADD-S (gt->pred) is not 0");
  require(add_s_error(half, Pose::identity(), unit, ChamferDirection::PredToGt) <= 1e-9,
          "half-turn ADD-S (pred->gt) is not 0");
}

// 2. The nearest-neighbor index agrees with an independent brute force within
//    1e-9 on m in {8, 64, 1000, 4096}, 100 random pose pairs each.
void oracle_equivalence() {
  for (const std::size_t m : {std::size_t{8}, std::size_t{64}, std::size_t{1000},
                              std::size_t{4096}}) {
    for (int pair = 0; pair < 100; ++pair) {
      std::mt19937_64 gen(splitmix64(
          0xADD5ULL ^ (static_cast<std::uint64_t>(m) * 1000 + pair)));
      const PointSet pts = random_points(gen, m, Vec3{60, 35, 20});
      const Pose pred = random_pose(gen, 300.0);
      const Pose gt = random_pose(gen, 300.0);
      const ChamferDirection dir =
          pair % 2 ? ChamferDirection::PredToGt : ChamferDirection::GtToPred;

      const double fast = add_s_error(pred, gt, pts, dir, /*bruteforce_max=*/1);
      const PointSet pa = apply_pose(pred, pts);
      const PointSet pg = apply_pose(gt, pts);
      const double ref = dir == ChamferDirection::PredToGt
                             ? brute_force_chamfer(pa, pg)
                             : brute_force_chamfer(pg, pa);
      require(std::abs(fast - ref) <= 1e-9,
              "index/brute-force mismatch at m=" + std::to_string(m) +
                  " pair=" + std::to_string(pair));
    }
  }
}

// 3. ADD-S <= ADD on 1000 fuzzed instances, both directions, zero violations.
void adds_bounded_by_add() {
  for (int i = 0; i < 1000; ++i) {
    std::mt19937_64 gen(splitmix64(0x5EEDULL ^ static_cast<std::uint64_t>(i)));
    const std::size_t m = 4 + static_cast<std::size_t>(uniform01(gen) * 61.0);
    const PointSet pts = random_points(gen, m, Vec3{50, 30, 15});
    const Pose pred = random_pose(gen, 200.0);
    const Pose gt = random_pose(gen, 200.0);
    const double add = add_error(pred, gt, pts);
    require(add_s_error(pred, gt, pts, ChamferDirection::GtToPred) <= add,
            "ADD-S (gt->pred) exceeds ADD at instance " + std::to_string(i));
    require(add_s_error(pred, gt, pts, ChamferDirection::PredToGt) <= add,
            "ADD-S (pred->gt) exceeds ADD at instance " + std::to_string(i));
  }
}

// 4. Analytic gradients match central differences to 1e-5 relative over 100
//    smooth instances, and halving h shrinks the disagreement at the
//    second-order rate.
void gradient_check() {
  const GradCheckReport rep = run_gradient_check(100, 1e-5, 20260819, 1e-5);
  require(rep.n_instances == 100, "gradient check did not run 100 instances");
  require(rep.pass && rep.max_rel_err < 1e-5,
          "max relative gradient error " + std::to_string(rep.max_rel_err));

  const LossWeights weights{1.0, 0.1, 0.0};
  const BoundingCube prior = box(40, 25, 60);
  int counted = 0;
  for (int k = 0; k < 20; ++k) {
    std::mt19937_64 gen(splitmix64(0xFDULL ^ static_cast<std::uint64_t>(k)));
    const BoundingCube gt_cube = scale_cube(prior, Vec3{1.07, 0.93, 1.12});
    const Pose gt_pose = random_pose(gen, 200.0);
    PoseScaleParams at;
    at.aa = AxisAngle{uniform_unit_vector(gen) * uniform_range(gen, 0.2, 1.2)};
    at.t = uniform_in_box(gen, Vec3{-150, -150, -150}, Vec3{150, 150, 150});
    at.s = ScaleParam{Vec3{uniform_range(gen, -0.3, 0.3),
                           uniform_range(gen, -0.3, 0.3),
                           uniform_range(gen, -0.3, 0.3)},
                      0.2};
    // skip instances near the |dV| kink where central differences lose order
    const BoundingCube pred = predicted_cube(at, prior);
    if (std::abs(volume(pred) - volume(gt_cube)) < 1.0) continue;

    const Gradient9 coarse = finite_difference_gradient(
        at, prior, gt_pose, gt_cube, weights, ChamferDirection::PredToGt, false,
        4e-3);
    const Gradient9 fine = finite_difference_gradient(
        at, prior, gt_pose, gt_cube, weights, ChamferDirection::PredToGt, false,
        2e-3);
    const Gradient9 exact = loss_gradient(at, prior, gt_pose, gt_cube, weights,
                                          ChamferDirection::PredToGt, false);
    double e_coarse = 0.0, e_fine = 0.0;
    for (int c = 0; c < 9; ++c) {
      e_coarse = std::max(e_coarse, std::abs(coarse[c] - exact[c]));
      e_fine = std::max(e_fine, std::abs(fine[c] - exact[c]));
    }
    if (e_coarse < 1e-7) continue;  // truncation already at the roundoff floor
    ++counted;
    require(e_fine <= 0.32 * e_coarse + 1e-12,
            "halving h did not shrink the FD error at the second-order rate "
            "(instance " + std::to_string(k) + ")");
  }
  require(counted >= 15, "too few smooth instances for the order study");
}

// 5. >= 95/100 seeded trials (20 deg / 0.3-diameter perturbations) recover
//    the pose to ADD < 0.1 * diameter within the iteration budget.
void fit_recovery() {
  const BoundingCube cube = box(40, 25, 60);
  const PointSet pts = cube_points(cube);
  const double d = diameter(pts);
  FitConfig cfg;
  cfg.weights = LossWeights{1, 0, 0};

  int ok = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::mt19937_64 gen(
        splitmix64(1234 ^ (0xf17ULL + static_cast<std::uint64_t>(trial))));
    const Pose gt{random_rotation(gen),
                  uniform_in_box(gen, {-300, -300, -300}, {300, 300, 300})};
    const PoseScaleParams init = perturb_pose(gt, 20.0 * kPi / 180.0, 0.3 * d, gen);
    const FitTrace tr = fit_pose(init, cube, gt, cube, cfg);
    require(tr.iterations <= cfg.max_iters, "iteration budget exceeded");
    if (add_error(tr.params.pose(), gt, pts) < 0.1 * d) ++ok;
  }
  require(ok >= 95, "only " + std::to_string(ok) + "/100 trials recovered");
}

// 6. Fitting against a 1.3x-scaled surrogate cube still recovers >= 90/100
//    poses when scored against the true model points.
void model_swap() {
  std::mt19937_64 gen(99);
  PointSet model;
  for (int i = 0; i < 400; ++i)
    model.push_back(uniform_in_box(gen, {-60, -35, -20}, {60, 35, 20}));
  for (int i = 0; i < 100; ++i)
    model.push_back(uniform_in_box(gen, {20, 10, 5}, {60, 35, 20}));

  Vec3 lo = model[0], hi = model[0];
  for (const Vec3& q : model) {
    lo = {std::min(lo.x, q.x), std::min(lo.y, q.y), std::min(lo.z, q.z)};
    hi = {std::max(hi.x, q.x), std::max(hi.y, q.y), std::max(hi.z, q.z)};
  }
  const BoundingCube true_cube = cube_from_aabb(lo, hi);
  const BoundingCube surrogate = scale_cube(true_cube, Vec3{1.3, 1.3, 1.3});

  FitConfig cfg;
  cfg.seed = 2024;
  cfg.weights = LossWeights{1, 0, 0};
  const SwapReport rep = model_swap_experiment(model, surrogate, 100, cfg);
  require(rep.n_trials == 100, "swap experiment dropped trials");
  require(std::abs(rep.threshold_mm - 0.1 * diameter(model)) <= 1e-9,
          "swap threshold is not 10% of the true diameter");
  require(rep.accuracy >= 0.9,
          "swap accuracy " + std::to_string(rep.accuracy) + " below 0.9");
}

// 7. Symmetric chamfer training with free scale collapses the volume below 5%
//    of the prior; the 0.2 scale offset floors it at 0.2^3 = 0.8%; the
//    asymmetric control stays within [80%, 125%].
void volume_collapse() {
  FitConfig cfg;
  cfg.seed = 5;
  cfg.max_iters = 4000;
  const CollapseReport rep = collapse_experiment(cfg);
  require(rep.no_offset.volume_ratio < 0.05,
          "free scale kept " + std::to_string(rep.no_offset.volume_ratio) +
              " of the prior volume");
  require(rep.with_offset.volume_ratio >= 0.008,
          "offset run fell below the 0.2^3 floor: " +
              std::to_string(rep.with_offset.volume_ratio));
  require(rep.control.volume_ratio >= 0.8 && rep.control.volume_ratio <= 1.25,
          "asymmetric control volume ratio " +
              std::to_string(rep.control.volume_ratio) + " outside [0.8, 1.25]");
}

// 8. RIoU: identical boxes 1.0; a 45-degree relative rotation or disjoint
//    footprints 0.0; symmetric in argument order to 1e-12 over 1000 pairs.
void riou_properties() {
  const BevBox b{80, 40, 0.3, 10, -5};
  require(std::abs(riou(b, b) - 1.0) <= 1e-12, "riou(b,b) is not 1");

  const BevBox g{80, 40, 0.0, 0, 0};
  BevBox rotated = g;
  rotated.r = kPi / 4.0;
  require(riou(g, rotated) <= 1e-12, "45-degree relative rotation is not 0");

  BevBox far_away = g;
  far_away.cx = 1000;
  far_away.cy = 1000;
  require(riou(g, far_away) <= 1e-12, "disjoint boxes are not 0");

  for (int i = 0; i < 1000; ++i) {
    std::mt19937_64 gen(splitmix64(0x210ULL ^ static_cast<std::uint64_t>(i)));
    const auto fuzz = [&gen]() {
      return BevBox{uniform_range(gen, 1, 100), uniform_range(gen, 1, 100),
                    uniform_range(gen, -kPi, kPi), uniform_range(gen, -200, 200),
                    uniform_range(gen, -200, 200)};
    };
    const BevBox x = fuzz(), y = fuzz();
    require(std::abs(riou(x, y) - riou(y, x)) <= 1e-12,
            "riou asymmetric at pair " + std::to_string(i));
  }
}

// 9. Subnet shape table for phi 0..6 matches the published scaling laws
//    exactly: n_iter = 1 + floor(phi/3), d_iter = d_rot = 2 + floor(phi/3).
void subnet_shape_table() {
  const int expect_n[7] = {1, 1, 1, 2, 2, 2, 3};
  const int expect_d[7] = {2, 2, 2, 3, 3, 3, 4};
  for (int phi = 0; phi <= 6; ++phi) {
    const SubnetShape s = subnet_shape(phi);
    require(s.n_iter == expect_n[phi] && s.d_iter == expect_d[phi] &&
                s.d_rot == expect_d[phi],
            "subnet shape wrong at phi=" + std::to_string(phi));
  }
}

void put_f64le(std::string& s, double d) {
  std::uint64_t u = 0;
  std::memcpy(&u, &d, sizeof(u));
  for (int i = 0; i < 8; ++i) s += static_cast<char>((u >> (8 * i)) & 0xff);
}

void put_i32le(std::string& s, std::int32_t v) {
  const auto u = static_cast<std::uint32_t>(v);
  for (int i = 0; i < 4; ++i) s += static_cast<char>((u >> (8 * i)) & 0xff);
}

// 10. PLY ascii/binary cross-format equality, KITTI 15-field round trip,
//     JSONL round trip, and the malformed-input guards.
void parser_round_trips() {
  // dyadic coordinates so the ascii decimal parse is bit-exact
  const double coords[4][3] = {{-12.5, 0.25, 3.75},
                               {100.125, -0.5, 7.0},
                               {0.0, 42.625, -9.25},
                               {1.5, 2.25, -3.125}};
  const std::string vertex_header =
      "element vertex 4\nproperty double x\nproperty double y\n"
      "property double z\nelement face 2\n"
      "property list uchar int vertex_indices\nend_header\n";

  std::string ascii = "ply\nformat ascii 1.0\n" + vertex_header;
  for (const auto& v : coords) {
    std::ostringstream row;
    row << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
    ascii += row.str();
  }
  ascii += "3 0 1 2\n3 1 2 3\n";

  std::string binary = "ply\nformat binary_little_endian 1.0\n" + vertex_header;
  for (const auto& v : coords)
    for (double c : v) put_f64le(binary, c);
  for (const auto& face : {std::vector<int>{0, 1, 2}, std::vector<int>{1, 2, 3}}) {
    binary += static_cast<char>(face.size());
    for (int ix : face) put_i32le(binary, ix);
  }

  const MeshModel a = parse_ply(ascii);
  const MeshModel b = parse_ply(binary);
  require(a.vertices.size() == 4 && b.vertices.size() == 4, "PLY vertex count");
  for (int i = 0; i < 4; ++i) {
    require(a.vertices[i].x == b.vertices[i].x &&
                a.vertices[i].y == b.vertices[i].y &&
                a.vertices[i].z == b.vertices[i].z,
            "PLY ascii/binary vertex mismatch at " + std::to_string(i));
  }
  require(a.faces == b.faces && a.faces.size() == 2, "PLY face mismatch");

  // KITTI: parse -> format -> parse is the identity on every field
  const std::string line =
      "Car 0.12 1 -1.58 587.01 173.33 614.12 200.12 1.65 1.67 3.64 "
      "-0.65 1.71 46.7 -1.59";
  const KittiAnnotation k1 = parse_kitti_label(line);
  const KittiAnnotation k2 = parse_kitti_label(format_kitti_label(k1));
  require(k1.type == k2.type && k1.truncated == k2.truncated &&
              k1.occluded == k2.occluded && k1.alpha == k2.alpha &&
              k1.bbox2d == k2.bbox2d && k1.h == k2.h && k1.w == k2.w &&
              k1.l == k2.l && k1.location.x == k2.location.x &&
              k1.location.y == k2.location.y && k1.location.z == k2.location.z &&
              k1.rotation_y == k2.rotation_y && !k1.score && !k2.score,
          "KITTI label round trip changed a field");
  const KittiAnnotation k3 = parse_kitti_label(line + " 0.87");
  const KittiAnnotation k4 = parse_kitti_label(format_kitti_label(k3));
  require(k3.score && k4.score && *k3.score == *k4.score,
          "KITTI score round trip changed the value");

  // JSONL round trip within 1e-12
  std::vector<AnnotationRecord> records;
  for (int i = 0; i < 3; ++i) {
    std::mt19937_64 gen(splitmix64(0x77AULL + static_cast<std::uint64_t>(i)));
    AnnotationRecord r;
    r.image_id = "img" + std::to_string(i);
    r.class_id = i % 2 ? "duck" : "cat";
    r.pose = random_pose(gen, 400.0);
    r.cube = box(30 + i, 20, 10 + 2 * i);
    r.symmetric = i == 1;
    r.source = i == 2 ? Source::Prediction : Source::GroundTruth;
    records.push_back(r);
  }
  std::ostringstream out;
  write_annotations(records, out);
  std::istringstream in(out.str());
  const std::vector<AnnotationRecord> back = read_annotations(in);
  require(back.size() == records.size(), "JSONL round trip lost records");
  for (std::size_t i = 0; i < records.size(); ++i) {
    const AnnotationRecord& r = records[i];
    const AnnotationRecord& s = back[i];
    require(r.image_id == s.image_id && r.class_id == s.class_id &&
                r.symmetric == s.symmetric && r.source == s.source,
            "JSONL identity fields changed");
    for (int c = 0; c < 9; ++c)
      require(std::abs(r.pose.rotation.m[c] - s.pose.rotation.m[c]) <= 1e-12,
              "JSONL rotation drifted");
    require(norm(r.pose.translation - s.pose.translation) <= 1e-12,
            "JSONL translation drifted");
    for (int v = 0; v < 8; ++v)
      require(distance(r.cube.vertices[v], s.cube.vertices[v]) <= 1e-12,
              "JSONL cube drifted");
  }

  // malformed inputs raise the documented errors instead of crashing
  const auto threw = [](const std::function<void()>& f,
                        const char* which) -> bool {
    try {
      f();
    } catch (const MalformedHeader&) {
      return std::strcmp(which, "MalformedHeader") == 0;
    } catch (const UnsupportedFormat&) {
      return std::strcmp(which, "UnsupportedFormat") == 0;
    } catch (const TruncatedBody&) {
      return std::strcmp(which, "TruncatedBody") == 0;
    } catch (const MalformedBody&) {
      return std::strcmp(which, "MalformedBody") == 0;
    } catch (const WrongFieldCount&) {
      return std::strcmp(which, "WrongFieldCount") == 0;
    } catch (const NonNumericField&) {
      return std::strcmp(which, "NonNumericField") == 0;
    } catch (const DontCareRecord&) {
      return std::strcmp(which, "DontCareRecord") == 0;
    } catch (const SchemaViolation&) {
      return std::strcmp(which, "SchemaViolation") == 0;
    } catch (const InvalidRotation&) {
      return std::strcmp(which, "InvalidRotation") == 0;
    }
    return false;
  };

  require(threw([] { parse_ply("not a ply\n"); }, "MalformedHeader"),
          "garbage PLY magic");
  require(threw(
              [] {
                parse_ply(
                    "ply\nformat binary_big_endian 1.0\nelement vertex 1\n"
                    "property float x\nproperty float y\nproperty float z\n"
                    "end_header\n");
              },
              "UnsupportedFormat"),
          "big-endian PLY");
  require(threw(
              [] {
                parse_ply(
                    "ply\nformat ascii 1.0\nelement vertex 2\n"
                    "property float x\nproperty float y\nproperty float z\n"
                    "end_header\n1 2 3\n");
              },
              "TruncatedBody"),
          "short PLY body");
  require(threw(
              [] {
                parse_ply(
                    "ply\nformat ascii 1.0\nelement vertex 1\n"
                    "property float x\nproperty float y\nproperty float z\n"
                    "end_header\n1 banana 3\n");
              },
              "MalformedBody"),
          "non-numeric PLY vertex");
  require(threw([&] { parse_kitti_label(line.substr(0, line.rfind(' '))); },
                "WrongFieldCount"),
          "14-field KITTI line");
  require(threw(
              [] {
                parse_kitti_label(
                    "Car x 0 -1.58 587.01 173.33 614.12 200.12 1.65 1.67 "
                    "3.64 -0.65 1.71 46.7 -1.59");
              },
              "NonNumericField"),
          "non-numeric KITTI field");
  require(threw(
              [&line] {
                kitti_to_record(parse_kitti_label("DontCare" + line.substr(3)),
                                "1");
              },
              "DontCareRecord"),
          "DontCare record conversion");

  const std::string good =
      R"({"image_id":"a","class_id":"cat","rotation":[1,0,0,0,1,0,0,0,1],)"
      R"("translation_mm":[0,0,1000],"cube_mm":[50,50,50,50,-50,50,50,-50,-50,)"
      R"(50,50,-50,-50,50,50,-50,-50,50,-50,-50,-50,-50,50,-50],)"
      R"("symmetric":false,"source":"gt"})";
  {
    std::istringstream ok(good);
    require(read_annotations(ok).size() == 1, "known-good JSONL line rejected");
  }
  require(threw(
              [&] {
                std::istringstream bad(good + "\n{oops\n");
                read_annotations(bad);
              },
              "SchemaViolation"),
          "non-JSON line");
  require(threw(
              [&] {
                std::string bad = good;
                bad.erase(bad.find("\"symmetric\":false,"),
                          std::string("\"symmetric\":false,").size());
                std::istringstream in2(bad);
                read_annotations(in2);
              },
              "SchemaViolation"),
          "missing field");
  require(threw(
              [&] {
                std::string bad = good;
                const std::string rot = "[1,0,0,0,1,0,0,0,1]";
                bad.replace(bad.find(rot), rot.size(), "[1,0,0,0,1,0,0,0,-1]");
                std::istringstream in2(bad);
                read_annotations(in2);
              },
              "InvalidRotation"),
          "reflection accepted as rotation");
}

// 11. The three frustum failure modes are each flagged with the right reason
//     and the visible control stays unflagged.
void frustum_audit_fixture() {
  const CameraIntrinsics k{500, 500, 320, 240, 640, 480};
  const BoundingCube big = box(50, 50, 50);
  const BoundingCube small = box(0.5, 0.5, 0.5);
  const auto at = [](const char* img, const char* cls, const BoundingCube& cube,
                     const Vec3& t) {
    AnnotationRecord r;
    r.image_id = img;
    r.class_id = cls;
    r.cube = cube;
    r.pose.translation = t;
    return r;
  };
  const std::vector<AnnotationRecord> records = {
      at("img0", "cat", big, {0, 0, 1000}),
      at("img1", "cat", big, {0, 0, -1000}),
      at("img2", "duck", big, {1e6, 0, 1000}),
      at("img3", "ape", small, {0, 0, 100000}),
  };
  const std::vector<AuditFlag> flags = frustum_audit(records, k);
  require(flags.size() == 3, "expected exactly 3 flags, got " +
                                 std::to_string(flags.size()));
  require(flags[0].image_id == "img1" &&
              flags[0].reason == AuditReason::BehindCamera,
          "behind-camera record misflagged");
  require(flags[1].image_id == "img2" &&
              flags[1].reason == AuditReason::OutOfFrame,
          "out-of-frame record misflagged");
  require(flags[2].image_id == "img3" &&
              flags[2].reason == AuditReason::TinyProjection,
          "tiny-projection record misflagged");
  for (const AuditFlag& f : flags)
    require(f.image_id != "img0", "visible control was flagged");
}

// 12. cmd_evaluate and cmd_fit write byte-identical outputs across two runs
//     with the same inputs and seed.
void cli_determinism() {
  std::ostringstream log;

  const fs::path eval1 = fresh_dir("eval1");
  const fs::path eval2 = fresh_dir("eval2");
  require(cmd_evaluate(fixture("eval_gt.jsonl"), fixture("eval_pred.jsonl"),
                       fixture("eval.cfg"), eval1.string(), log) == 0,
          "cmd_evaluate run 1 failed");
  require(cmd_evaluate(fixture("eval_gt.jsonl"), fixture("eval_pred.jsonl"),
                       fixture("eval.cfg"), eval2.string(), log) == 0,
          "cmd_evaluate run 2 failed");
  require(read_file(eval1 / "report.csv") == read_file(eval2 / "report.csv"),
          "evaluate reports differ between runs");

  const fs::path fit1 = fresh_dir("fit1");
  const fs::path fit2 = fresh_dir("fit2");
  require(cmd_fit(fixture("fit_prior.json"), fixture("fit_gt.jsonl"),
                  fixture("fit.cfg"), fit1.string(), /*init_from_gt=*/false,
                  log) == 0,
          "cmd_fit run 1 failed");
  require(cmd_fit(fixture("fit_prior.json"), fixture("fit_gt.jsonl"),
                  fixture("fit.cfg"), fit2.string(), /*init_from_gt=*/false,
                  log) == 0,
          "cmd_fit run 2 failed");
  require(read_file(fit1 / "fit_trace.csv") == read_file(fit2 / "fit_trace.csv"),
          "fit traces differ between runs");
  require(read_file(fit1 / "fit_trace.svg") == read_file(fit2 / "fit_trace.svg"),
          "fit charts differ between runs");
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void()>>> criteria = {
      {"metric identities (zero self-error, pure translation, half-turn cube)",
       metric_identities},
      {"nearest-neighbor ADD-S matches brute force (m = 8/64/1000/4096)",
       oracle_equivalence},
      {"ADD-S never exceeds ADD on 1000 fuzzed instances", adds_bounded_by_add},
      {"analytic gradients match finite differences; halving h is second order",
       gradient_check},
      {"pose fitting recovers >= 95/100 perturbed starts", fit_recovery},
      {"1.3x surrogate cube still recovers >= 90/100 poses", model_swap},
      {"volume collapse, offset floor, and asymmetric control", volume_collapse},
      {"RIoU values and argument symmetry", riou_properties},
      {"subnet shape table for phi 0..6", subnet_shape_table},
      {"PLY/KITTI/JSONL round trips and malformed-input guards",
       parser_round_trips},
      {"frustum audit flags the three failure modes only", frustum_audit_fixture},
      {"evaluate and fit outputs are byte-identical across reruns",
       cli_determinism},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    try {
      criteria[i].second();
    } catch (const std::exception& e) {
      detail = e.what();
    }
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    if (detail.empty()) {
      std::printf("PASS %2zu/12 %s (%lld ms)\n", i + 1, criteria[i].first,
                  static_cast<long long>(ms));
    } else {
      ++failed;
      std::printf("FAIL %2zu/12 %s: %s\n", i + 1, criteria[i].first,
                  detail.c_str());
    }
    std::fflush(stdout);
  }
  std::printf("%d/12 acceptance criteria passed\n",
              static_cast<int>(criteria.size()) - failed);
  return failed == 0 ? 0 : 1;
}
