#include "cubepose/commands.hpp"

#include <cerrno>
#include <climits>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "cubepose/errors.hpp"
#include "cubepose/report.hpp"
#include "cubepose/rng.hpp"
#include "cubepose/text.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace cubepose {

namespace {

ExperimentConfig config_or_default(const std::string& path) {
  return path.empty() ? ExperimentConfig{} : load_config(path);
}

std::vector<AnnotationRecord> read_annotation_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingFile(path);
  return read_annotations(in);
}

std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFile(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MissingFile("cannot write " + path.string());
  out << text;
}

double parse_kv_double(const std::string& key, std::string_view raw) {
  const std::string s(raw);
  if (s.empty()) throw BadValue(key);
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v))
    throw BadValue(key);
  return v;
}

int parse_kv_int(const std::string& key, std::string_view raw) {
  const std::string s(raw);
  if (s.empty()) throw BadValue(key);
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size() || errno == ERANGE || v < INT_MIN || v > INT_MAX)
    throw BadValue(key);
  return static_cast<int>(v);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

BoundingCube cube_from_flat(const std::vector<double>& flat, const std::string& what) {
  if (flat.size() != 24) throw SchemaViolation(what + ": cube_mm must have 24 numbers");
  BoundingCube cube;
  for (std::size_t i = 0; i < 8; ++i)
    cube.vertices[i] = Vec3{flat[3 * i], flat[3 * i + 1], flat[3 * i + 2]};
  if (!is_parallelepiped(cube))
    throw SchemaViolation(what + ": cube_mm vertices are not a parallelepiped");
  return cube;
}

BoundingCube load_prior_cube(const std::string& path, double ply_scale) {
  const std::string bytes = read_file_bytes(path);
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".ply") {
    MeshModel mesh = parse_ply(bytes);
    for (Vec3& v : mesh.vertices) v = v * ply_scale;
    return mesh_cube(mesh);
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::exception&) {
    throw SchemaViolation(path + ": invalid JSON");
  }
  if (!j.is_object() || !j.contains("cube_mm") || !j["cube_mm"].is_array())
    throw SchemaViolation(path + ": expected an object with a cube_mm array");
  std::vector<double> flat;
  for (const auto& v : j["cube_mm"]) {
    if (!v.is_number()) throw SchemaViolation(path + ": cube_mm must be numeric");
    flat.push_back(v.get<double>());
  }
  return cube_from_flat(flat, path);
}

}  // namespace

CameraIntrinsics parse_intrinsics(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string_view text = trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos)
      throw BadValue("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key(trim(text.substr(0, eq)));
    const std::string value(trim(text.substr(eq + 1)));
    if (key.empty())
      throw BadValue("line " + std::to_string(line_no) + ": empty key");
    if (!kv.emplace(key, value).second) throw BadValue(key + " appears twice");
  }
  static const char* const kKeys[] = {"fx", "fy", "cx", "cy", "width", "height"};
  for (const char* k : kKeys)
    if (!kv.count(k)) throw BadValue(std::string(k) + " is missing");
  for (const auto& [key, value] : kv) {
    (void)value;
    bool known = false;
    for (const char* k : kKeys) known = known || key == k;
    if (!known) throw BadValue(key + " is not a recognized key");
  }
  CameraIntrinsics k;
  k.fx = parse_kv_double("fx", kv["fx"]);
  k.fy = parse_kv_double("fy", kv["fy"]);
  k.cx = parse_kv_double("cx", kv["cx"]);
  k.cy = parse_kv_double("cy", kv["cy"]);
  k.image_w = parse_kv_int("width", kv["width"]);
  k.image_h = parse_kv_int("height", kv["height"]);
  validate_intrinsics(k);
  return k;
}

CameraIntrinsics load_intrinsics(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingFile(path);
  return parse_intrinsics(in);
}

int cmd_evaluate(const std::string& gt_path, const std::string& pred_path,
                 const std::string& config_path, const std::string& out_dir,
                 std::ostream& log) {
  try {
    const ExperimentConfig cfg = config_or_default(config_path);
    const std::vector<AnnotationRecord> gt = read_annotation_file(gt_path);
    const std::vector<AnnotationRecord> pred = read_annotation_file(pred_path);
    const EvalReport report = evaluate_records(gt, pred, cfg);

    fs::create_directories(out_dir);
    const fs::path csv_path = fs::path(out_dir) / "report.csv";
    write_text_file(csv_path, eval_report_csv(report));

    for (const auto& [class_id, s] : report.per_class)
      log << class_id << ": accuracy " << format_double(s.accuracy) << " ("
          << s.n_correct << '/' << s.n_gt + s.n_extra << "), mean error "
          << format_double(s.mean_error_mm) << " mm\n";
    log << "overall: accuracy " << format_double(report.overall.accuracy)
        << " (" << report.overall.n_correct << '/'
        << report.overall.n_gt + report.overall.n_extra << ")\n";
    log << "wrote " << csv_path.string() << '\n';
    return kExitSuccess;
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return kExitInputError;
  }
}

int cmd_fit(const std::string& prior_path, const std::string& gt_path,
            const std::string& config_path, const std::string& out_dir,
            bool init_from_gt, std::ostream& log) {
  try {
    const ExperimentConfig cfg = config_or_default(config_path);
    const BoundingCube prior = load_prior_cube(prior_path, cfg.ply_scale);
    const std::vector<AnnotationRecord> records = read_annotation_file(gt_path);
    if (records.empty()) throw EmptyInput("no records in " + gt_path);
    const AnnotationRecord& rec = records.front();
    const bool symmetric =
        rec.symmetric || cfg.symmetric_classes.count(rec.class_id) > 0;

    FitConfig run;
    run.max_iters = cfg.max_iters;
    run.step_size = cfg.step_size;
    run.weights = cfg.weights;
    run.loss_direction = cfg.direction_loss;
    run.symmetric = symmetric;
    run.fit_scale = true;
    run.seed = cfg.seed;
    run.eval_points = cube_points(rec.cube);

    PoseScaleParams init;
    if (init_from_gt) {
      init.aa = rotation_to_axis_angle(rec.pose.rotation);
      init.t = rec.pose.translation;
    } else {
      std::mt19937_64 gen(splitmix64(cfg.seed ^ 0xf17c11ULL));
      const double d = diameter(cube_points(rec.cube));
      init = perturb_pose(rec.pose, 20.0 * kPi / 180.0, 0.3 * d, gen);
    }
    // Effective scale 1 where reachable; exact zero raw when offset is 0 so a
    // ground-truth start reproduces the target bit for bit.
    const double raw0 = cfg.offset == 0.0 ? 0.0
                        : cfg.offset < 1.0 ? std::log(1.0 - cfg.offset)
                                           : 0.0;
    init.s = ScaleParam{Vec3{raw0, raw0, raw0}, cfg.offset};

    const FitTrace trace = fit_pose(init, prior, rec.pose, rec.cube, run);

    std::ostringstream csv;
    csv << config_comment_block(cfg);
    csv << "iter,loss_mm,adds_vs_true\n";
    for (const FitStep& s : trace.steps)
      csv << s.iter << ',' << format_double(s.loss) << ','
          << format_double(s.eval) << '\n';

    fs::create_directories(out_dir);
    const fs::path csv_path = fs::path(out_dir) / "fit_trace.csv";
    const fs::path svg_path = fs::path(out_dir) / "fit_trace.svg";
    write_text_file(csv_path, csv.str());

    ChartSeries loss_series{"loss_mm", "#1f77b4", {}};
    ChartSeries eval_series{"adds_vs_true", "#d62728", {}};
    for (const FitStep& s : trace.steps) {
      loss_series.points.emplace_back(s.iter, s.loss);
      eval_series.points.emplace_back(s.iter, s.eval);
    }
    write_text_file(svg_path,
                    line_chart_svg("pose fit trace for " + rec.class_id,
                                   "iteration", "mm", {loss_series, eval_series},
                                   cfg));

    log << "fit: " << trace.iterations << " iterations, final loss "
        << format_double(trace.loss)
        << (trace.converged ? " mm (converged)" : " mm (budget exhausted)")
        << '\n';
    log << "wrote " << csv_path.string() << " and " << svg_path.string() << '\n';
    return kExitSuccess;
  } catch (const Diverged& e) {
    log << "diverged: " << e.what() << '\n';
    return kExitDiverged;
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return kExitInputError;
  }
}

int cmd_gradcheck(const std::string& config_path, std::ostream& log,
                  const GradientFn& gradient) {
  try {
    const ExperimentConfig cfg = config_or_default(config_path);
    const GradCheckReport rep =
        run_gradient_check(100, 1e-5, cfg.seed, 1e-5, gradient);
    log << config_comment_block(cfg);
    log << "instances = " << rep.n_instances << ", h = " << format_double(rep.h)
        << ", tol = " << format_double(rep.tol) << '\n';
    log << "max rel err = " << format_double(rep.max_rel_err) << '\n';
    if (rep.pass) {
      log << "PASS\n";
      return kExitSuccess;
    }
    log << "FAIL\n";
    log << "worst instance " << rep.worst_instance << " (seed "
        << rep.worst_seed << ")\n";
    for (std::size_t i = 0; i < rep.rel_errs.size(); ++i)
      log << "  component " << i << ": rel err "
          << format_double(rep.rel_errs[i]) << '\n';
    return kExitCheckFailure;
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return kExitInputError;
  }
}

int cmd_audit(const std::string& gt_path, const std::string& intrinsics_path,
              const std::string& config_path, const std::string& out_dir,
              std::ostream& log) {
  try {
    const ExperimentConfig cfg = config_or_default(config_path);
    const std::vector<AnnotationRecord> records = read_annotation_file(gt_path);
    const CameraIntrinsics k = load_intrinsics(intrinsics_path);
    const std::vector<AuditFlag> flags =
        frustum_audit(records, k, cfg.min_area_px);

    int behind = 0, out_of_frame = 0, tiny = 0;
    std::ostringstream csv;
    csv << config_comment_block(cfg);
    csv << "image_id,class_id,reason\n";
    for (const AuditFlag& f : flags) {
      csv << csv_field(f.image_id) << ',' << csv_field(f.class_id) << ','
          << to_string(f.reason) << '\n';
      switch (f.reason) {
        case AuditReason::BehindCamera: ++behind; break;
        case AuditReason::OutOfFrame: ++out_of_frame; break;
        case AuditReason::TinyProjection: ++tiny; break;
      }
    }

    fs::create_directories(out_dir);
    const fs::path csv_path = fs::path(out_dir) / "audit.csv";
    write_text_file(csv_path, csv.str());

    log << "audited " << records.size() << " records: " << flags.size()
        << " flagged (BehindCamera=" << behind << ", OutOfFrame="
        << out_of_frame << ", TinyProjection=" << tiny << ")\n";
    log << "wrote " << csv_path.string() << '\n';
    return kExitSuccess;
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return kExitInputError;
  }
}

namespace {

std::string safe_file_stem(const std::string& class_id) {
  std::string out;
  for (const char c : class_id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '_';
    out += ok ? c : '_';
  }
  return out.empty() ? "_" : out;
}

}  // namespace

int cmd_prior(const std::string& gt_path, const std::string& out_dir,
              double fixed_mm, const std::string& config_path,
              std::ostream& log) {
  try {
    if (fixed_mm < 0.0 || !std::isfinite(fixed_mm)) throw BadValue("fixed-mm");
    const ExperimentConfig cfg = config_or_default(config_path);
    const std::vector<AnnotationRecord> records = read_annotation_file(gt_path);
    if (records.empty()) throw EmptyInput("no records in " + gt_path);

    std::map<std::string, std::vector<BoundingCube>> by_class;
    for (const AnnotationRecord& r : records) by_class[r.class_id].push_back(r.cube);

    fs::create_directories(out_dir);
    for (const auto& [class_id, cubes] : by_class) {
      ClassPrior prior;
      if (fixed_mm > 0.0) {
        const double h = fixed_mm / 2.0;
        prior.class_id = class_id;
        prior.prior_cube = cube_from_aabb(Vec3{-h, -h, -h}, Vec3{h, h, h});
        prior.avg_diameter = diameter(cube_points(prior.prior_cube));
      } else {
        prior = class_prior(cubes, class_id);
      }

      nlohmann::ordered_json j;
      j["class_id"] = prior.class_id;
      j["n_records"] = cubes.size();
      std::vector<double> flat;
      for (const Vec3& v : cube_points(prior.prior_cube)) {
        flat.push_back(v.x);
        flat.push_back(v.y);
        flat.push_back(v.z);
      }
      j["cube_mm"] = flat;
      j["avg_diameter_mm"] = prior.avg_diameter;
      j["config"] = format_config(cfg);

      const fs::path path =
          fs::path(out_dir) / ("prior_" + safe_file_stem(class_id) + ".json");
      write_text_file(path, j.dump(2) + "\n");
      log << class_id << ": " << cubes.size() << " records, prior diameter "
          << format_double(prior.avg_diameter) << " mm -> " << path.string()
          << '\n';
    }
    return kExitSuccess;
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return kExitInputError;
  }
}

}  // namespace cubepose
