#include "cubepose/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cubepose/errors.hpp"
#include "cubepose/text.hpp"

namespace cubepose {

SubnetShape subnet_shape(int phi) {
  if (phi < 0) throw BadValue("phi");
  const int f = phi / 3;
  return SubnetShape{1 + f, 2 + f, 2 + f};
}

namespace {

double parse_double_value(const std::string& key, std::string_view raw) {
  const std::string s(raw);
  if (s.empty()) throw BadValue(key);
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v))
    throw BadValue(key);
  return v;
}

long long parse_int_value(const std::string& key, std::string_view raw) {
  const std::string s(raw);
  if (s.empty()) throw BadValue(key);
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size() || errno == ERANGE) throw BadValue(key);
  return v;
}

std::uint64_t parse_seed_value(const std::string& key, std::string_view raw) {
  const std::string s(raw);
  if (s.empty() || s[0] == '-') throw BadValue(key);
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size() || errno == ERANGE) throw BadValue(key);
  return v;
}

ChamferDirection parse_direction_value(const std::string& key, std::string_view raw) {
  if (raw == "pred_to_gt") return ChamferDirection::PredToGt;
  if (raw == "gt_to_pred") return ChamferDirection::GtToPred;
  throw BadValue(key);
}

std::set<std::string> parse_class_set(std::string_view raw) {
  std::set<std::string> out;
  while (!raw.empty()) {
    const auto comma = raw.find(',');
    const std::string_view tok = trim(raw.substr(0, comma));
    if (!tok.empty()) out.emplace(tok);
    if (comma == std::string_view::npos) break;
    raw.remove_prefix(comma + 1);
  }
  return out;
}

void validate(const ExperimentConfig& cfg) {
  if (!(cfg.k > 0.0) || !std::isfinite(cfg.k)) throw BadValue("k");
  if (!(cfg.offset >= 0.0) || !std::isfinite(cfg.offset)) throw BadValue("offset");
  if (!(cfg.weights.w_cube >= 0.0)) throw BadValue("w_cube");
  if (!(cfg.weights.w_volume >= 0.0)) throw BadValue("w_volume");
  if (!(cfg.weights.w_riou >= 0.0)) throw BadValue("w_riou");
  if (!(cfg.ply_scale > 0.0) || !std::isfinite(cfg.ply_scale)) throw BadValue("ply_scale");
  if (!(cfg.min_area_px >= 0.0)) throw BadValue("min_area_px");
  if (cfg.max_iters < 1) throw BadValue("max_iters");
  if (!(cfg.step_size > 0.0) || !std::isfinite(cfg.step_size)) throw BadValue("step_size");
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
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
    const std::string_view value = trim(text.substr(eq + 1));
    if (key.empty())
      throw BadValue("line " + std::to_string(line_no) + ": empty key");
    if (!seen.insert(key).second) throw BadValue(key + " appears twice");

    if (key == "k") cfg.k = parse_double_value(key, value);
    else if (key == "offset") cfg.offset = parse_double_value(key, value);
    else if (key == "w_cube") cfg.weights.w_cube = parse_double_value(key, value);
    else if (key == "w_volume") cfg.weights.w_volume = parse_double_value(key, value);
    else if (key == "w_riou") cfg.weights.w_riou = parse_double_value(key, value);
    else if (key == "direction_eval") cfg.direction_eval = parse_direction_value(key, value);
    else if (key == "direction_loss") cfg.direction_loss = parse_direction_value(key, value);
    else if (key == "symmetric_classes") cfg.symmetric_classes = parse_class_set(value);
    else if (key == "seed") cfg.seed = parse_seed_value(key, value);
    else if (key == "ply_scale") cfg.ply_scale = parse_double_value(key, value);
    else if (key == "min_area_px") cfg.min_area_px = parse_double_value(key, value);
    else if (key == "max_iters") {
      const long long v = parse_int_value(key, value);
      if (v < 1 || v > 1000000000LL) throw BadValue(key);
      cfg.max_iters = static_cast<int>(v);
    } else if (key == "step_size") cfg.step_size = parse_double_value(key, value);
    else throw BadValue(key + " is not a recognized key");
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingFile(path);
  return parse_config(in);
}

namespace {

const char* direction_name(ChamferDirection d) {
  return d == ChamferDirection::PredToGt ? "pred_to_gt" : "gt_to_pred";
}

}  // namespace

std::string format_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "k = " << format_double(cfg.k) << '\n';
  out << "offset = " << format_double(cfg.offset) << '\n';
  out << "w_cube = " << format_double(cfg.weights.w_cube) << '\n';
  out << "w_volume = " << format_double(cfg.weights.w_volume) << '\n';
  out << "w_riou = " << format_double(cfg.weights.w_riou) << '\n';
  out << "direction_eval = " << direction_name(cfg.direction_eval) << '\n';
  out << "direction_loss = " << direction_name(cfg.direction_loss) << '\n';
  out << "symmetric_classes = ";
  bool first = true;
  for (const std::string& c : cfg.symmetric_classes) {
    if (!first) out << ',';
    out << c;
    first = false;
  }
  out << '\n';
  out << "seed = " << cfg.seed << '\n';
  out << "ply_scale = " << format_double(cfg.ply_scale) << '\n';
  out << "min_area_px = " << format_double(cfg.min_area_px) << '\n';
  out << "max_iters = " << cfg.max_iters << '\n';
  out << "step_size = " << format_double(cfg.step_size) << '\n';
  return out.str();
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return a.k == b.k && a.offset == b.offset &&
         a.weights.w_cube == b.weights.w_cube &&
         a.weights.w_volume == b.weights.w_volume &&
         a.weights.w_riou == b.weights.w_riou &&
         a.direction_eval == b.direction_eval &&
         a.direction_loss == b.direction_loss &&
         a.symmetric_classes == b.symmetric_classes && a.seed == b.seed &&
         a.ply_scale == b.ply_scale && a.min_area_px == b.min_area_px &&
         a.max_iters == b.max_iters && a.step_size == b.step_size;
}

}  // namespace cubepose
