#include "cubepose/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace cubepose {

namespace {

enum class PropType { I8, U8, I16, U16, I32, U32, F32, F64 };

std::size_t prop_size(PropType t) {
  switch (t) {
    case PropType::I8:
    case PropType::U8: return 1;
    case PropType::I16:
    case PropType::U16: return 2;
    case PropType::I32:
    case PropType::U32:
    case PropType::F32: return 4;
    case PropType::F64: return 8;
  }
  return 0;
}

std::optional<PropType> prop_type_from(const std::string& s) {
  if (s == "char" || s == "int8") return PropType::I8;
  if (s == "uchar" || s == "uint8") return PropType::U8;
  if (s == "short" || s == "int16") return PropType::I16;
  if (s == "ushort" || s == "uint16") return PropType::U16;
  if (s == "int" || s == "int32") return PropType::I32;
  if (s == "uint" || s == "uint32") return PropType::U32;
  if (s == "float" || s == "float32") return PropType::F32;
  if (s == "double" || s == "float64") return PropType::F64;
  return std::nullopt;
}

struct PlyProperty {
  std::string name;
  bool is_list = false;
  PropType count_type = PropType::U8;
  PropType value_type = PropType::F32;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> props;
};

double parse_number_token(const std::string& tok) {
  if (tok.empty()) throw MalformedBody("empty numeric token");
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size())
    throw MalformedBody("non-numeric token '" + tok + "'");
  return v;
}

std::size_t list_count_from(double v) {
  if (v < 0.0 || v != std::floor(v))
    throw MalformedBody("bad list count");
  return static_cast<std::size_t>(v);
}

// Whitespace tokenizer for the ASCII body.
struct AsciiCursor {
  const std::string& bytes;
  std::size_t pos;
  double next() {
    while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    if (pos >= bytes.size()) throw TruncatedBody("vertex data ends early");
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    return parse_number_token(bytes.substr(start, pos - start));
  }
};

// Little-endian binary body reader.
struct BinaryCursor {
  const std::string& bytes;
  std::size_t pos;
  double next(PropType t) {
    const std::size_t n = prop_size(t);
    if (pos + n > bytes.size()) throw TruncatedBody("vertex data ends early");
    const char* p = bytes.data() + pos;
    pos += n;
    switch (t) {
      case PropType::I8: { std::int8_t v; std::memcpy(&v, p, 1); return v; }
      case PropType::U8: { std::uint8_t v; std::memcpy(&v, p, 1); return v; }
      case PropType::I16: { std::int16_t v; std::memcpy(&v, p, 2); return v; }
      case PropType::U16: { std::uint16_t v; std::memcpy(&v, p, 2); return v; }
      case PropType::I32: { std::int32_t v; std::memcpy(&v, p, 4); return v; }
      case PropType::U32: { std::uint32_t v; std::memcpy(&v, p, 4); return v; }
      case PropType::F32: { float v; std::memcpy(&v, p, 4); return v; }
      case PropType::F64: { double v; std::memcpy(&v, p, 8); return v; }
    }
    return 0.0;
  }
};

std::string fmt_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

MeshModel parse_ply(const std::string& bytes) {
  std::size_t pos = 0;
  const auto next_line = [&]() -> std::optional<std::string> {
    if (pos >= bytes.size()) return std::nullopt;
    const std::size_t nl = bytes.find('\n', pos);
    std::string line = nl == std::string::npos ? bytes.substr(pos)
                                               : bytes.substr(pos, nl - pos);
    pos = nl == std::string::npos ? bytes.size() : nl + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  };

  const auto magic = next_line();
  if (!magic || *magic != "ply") throw MalformedHeader("missing 'ply' magic line");

  bool ascii = false;
  bool have_format = false;
  std::vector<PlyElement> elements;
  bool header_done = false;

  while (auto line_opt = next_line()) {
    const std::string& line = *line_opt;
    std::istringstream ss(line);
    std::string word;
    if (!(ss >> word) ) continue;  // blank header line
    if (word == "comment" || word == "obj_info") continue;
    if (word == "end_header") { header_done = true; break; }
    if (word == "format") {
      std::string fmt, version;
      if (!(ss >> fmt >> version) || version != "1.0")
        throw MalformedHeader("bad format line '" + line + "'");
      if (fmt == "ascii") ascii = true;
      else if (fmt == "binary_little_endian") ascii = false;
      else if (fmt == "binary_big_endian")
        throw UnsupportedFormat("big-endian bodies are not supported");
      else throw MalformedHeader("unknown format '" + fmt + "'");
      have_format = true;
      continue;
    }
    if (word == "element") {
      std::string name;
      long long count = -1;
      if (!(ss >> name >> count) || count < 0)
        throw MalformedHeader("bad element line '" + line + "'");
      elements.push_back({name, static_cast<std::size_t>(count), {}});
      continue;
    }
    if (word == "property") {
      if (elements.empty())
        throw MalformedHeader("property before any element");
      std::string t1;
      if (!(ss >> t1)) throw MalformedHeader("bad property line '" + line + "'");
      PlyProperty prop;
      if (t1 == "list") {
        std::string tc, tv;
        if (!(ss >> tc >> tv >> prop.name))
          throw MalformedHeader("bad property line '" + line + "'");
        const auto ct = prop_type_from(tc);
        const auto vt = prop_type_from(tv);
        if (!ct || !vt)
          throw MalformedHeader("unknown property type in '" + line + "'");
        prop.is_list = true;
        prop.count_type = *ct;
        prop.value_type = *vt;
      } else {
        const auto vt = prop_type_from(t1);
        if (!vt || !(ss >> prop.name))
          throw MalformedHeader("bad property line '" + line + "'");
        prop.value_type = *vt;
      }
      elements.back().props.push_back(prop);
      continue;
    }
    throw MalformedHeader("unexpected header line '" + line + "'");
  }

  if (!header_done) throw MalformedHeader("missing end_header");
  if (!have_format) throw MalformedHeader("missing format line");

  const auto vertex_it =
      std::find_if(elements.begin(), elements.end(),
                   [](const PlyElement& e) { return e.name == "vertex"; });
  if (vertex_it == elements.end())
    throw MalformedHeader("no vertex element declared");
  if (vertex_it->count == 0)
    throw MalformedHeader("vertex count must be >= 1");

  int ix = -1, iy = -1, iz = -1;
  for (std::size_t i = 0; i < vertex_it->props.size(); ++i) {
    const PlyProperty& p = vertex_it->props[i];
    if (p.name != "x" && p.name != "y" && p.name != "z") continue;
    if (p.is_list || (p.value_type != PropType::F32 && p.value_type != PropType::F64))
      throw MalformedHeader("vertex " + p.name + " must be float32 or float64");
    (p.name == "x" ? ix : p.name == "y" ? iy : iz) = static_cast<int>(i);
  }
  if (ix < 0 || iy < 0 || iz < 0)
    throw MalformedHeader("vertex element must declare x, y, z");

  MeshModel mesh;
  mesh.vertices.reserve(vertex_it->count);

  AsciiCursor acur{bytes, pos};
  BinaryCursor bcur{bytes, pos};
  const auto read_value = [&](PropType t) {
    return ascii ? acur.next() : bcur.next(t);
  };

  for (const PlyElement& elem : elements) {
    const bool is_vertex = &elem == &*vertex_it;
    const bool is_face = elem.name == "face";
    // the first list property of the face element carries the indices
    int face_list_idx = -1;
    if (is_face) {
      for (std::size_t i = 0; i < elem.props.size(); ++i)
        if (elem.props[i].is_list) { face_list_idx = static_cast<int>(i); break; }
    }

    for (std::size_t n = 0; n < elem.count; ++n) {
      Vec3 v;
      std::vector<std::uint32_t> face;
      for (std::size_t i = 0; i < elem.props.size(); ++i) {
        const PlyProperty& p = elem.props[i];
        if (p.is_list) {
          const std::size_t count = list_count_from(read_value(p.count_type));
          for (std::size_t k = 0; k < count; ++k) {
            const double val = read_value(p.value_type);
            if (is_face && static_cast<int>(i) == face_list_idx) {
              if (val < 0.0 || val != std::floor(val) ||
                  val >= static_cast<double>(vertex_it->count))
                throw MalformedBody("face index out of range");
              face.push_back(static_cast<std::uint32_t>(val));
            }
          }
        } else {
          const double val = read_value(p.value_type);
          if (is_vertex) {
            if (static_cast<int>(i) == ix) v.x = val;
            else if (static_cast<int>(i) == iy) v.y = val;
            else if (static_cast<int>(i) == iz) v.z = val;
          }
        }
      }
      if (is_vertex) mesh.vertices.push_back(v);
      if (is_face) mesh.faces.push_back(std::move(face));
    }
  }
  return mesh;
}

BoundingCube mesh_cube(const MeshModel& m) {
  if (m.vertices.empty()) throw TooFewPoints("mesh has no vertices");
  Vec3 lo = m.vertices[0], hi = m.vertices[0];
  for (const Vec3& v : m.vertices) {
    lo = {std::min(lo.x, v.x), std::min(lo.y, v.y), std::min(lo.z, v.z)};
    hi = {std::max(hi.x, v.x), std::max(hi.y, v.y), std::max(hi.z, v.z)};
  }
  return cube_from_aabb(lo, hi);
}

KittiAnnotation parse_kitti_label(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> fields;
  std::string tok;
  while (ss >> tok) fields.push_back(tok);
  if (fields.size() != 15 && fields.size() != 16)
    throw WrongFieldCount("expected 15 or 16 fields, got " +
                          std::to_string(fields.size()));

  const auto num = [&](std::size_t i) {
    char* end = nullptr;
    const double v = std::strtod(fields[i].c_str(), &end);
    if (fields[i].empty() || end != fields[i].c_str() + fields[i].size())
      throw NonNumericField("field " + std::to_string(i) + " is '" + fields[i] + "'");
    return v;
  };

  KittiAnnotation a;
  a.type = fields[0];
  a.truncated = num(1);
  const double occ = num(2);
  if (occ != std::floor(occ))
    throw NonNumericField("occluded must be an integer, got '" + fields[2] + "'");
  a.occluded = static_cast<int>(occ);
  a.alpha = num(3);
  a.bbox2d = {num(4), num(5), num(6), num(7)};
  a.h = num(8);
  a.w = num(9);
  a.l = num(10);
  a.location = {num(11), num(12), num(13)};
  a.rotation_y = num(14);
  if (fields.size() == 16) a.score = num(15);
  return a;
}

std::string format_kitti_label(const KittiAnnotation& a) {
  std::string out = a.type;
  for (const double v :
       {a.truncated, static_cast<double>(a.occluded), a.alpha, a.bbox2d[0],
        a.bbox2d[1], a.bbox2d[2], a.bbox2d[3], a.h, a.w, a.l, a.location.x,
        a.location.y, a.location.z, a.rotation_y}) {
    out += ' ';
    out += fmt_double(v);
  }
  if (a.score) {
    out += ' ';
    out += fmt_double(*a.score);
  }
  return out;
}

AnnotationRecord kitti_to_record(const KittiAnnotation& a,
                                 const std::string& image_id, Source source) {
  if (a.dont_care()) throw DontCareRecord("DontCare annotation has no pose");
  AnnotationRecord r;
  r.image_id = image_id;
  r.class_id = a.type;
  const double l = a.l * 1000.0, h = a.h * 1000.0, w = a.w * 1000.0;
  r.cube = cube_from_aabb({-l / 2, -h, -w / 2}, {l / 2, 0, w / 2});
  const double c = std::cos(a.rotation_y), s = std::sin(a.rotation_y);
  r.pose.rotation = Rotation{{c, 0, s, 0, 1, 0, -s, 0, c}};
  r.pose.translation = a.location * 1000.0;
  r.symmetric = false;
  r.source = source;
  return r;
}

namespace {

using json = nlohmann::json;

const json& require_field(const json& j, const char* key, int line_no) {
  const auto it = j.find(key);
  if (it == j.end())
    throw SchemaViolation("line " + std::to_string(line_no) +
                          ": missing field '" + key + "'");
  return *it;
}

std::vector<double> number_array(const json& j, const char* key,
                                 std::size_t count, int line_no) {
  const json& arr = require_field(j, key, line_no);
  if (!arr.is_array() || arr.size() != count)
    throw SchemaViolation("line " + std::to_string(line_no) + ": '" + key +
                          "' must be an array of " + std::to_string(count) +
                          " numbers");
  std::vector<double> out;
  out.reserve(count);
  for (const auto& v : arr) {
    if (!v.is_number())
      throw SchemaViolation("line " + std::to_string(line_no) + ": '" + key +
                            "' must contain only numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

AnnotationRecord record_from_json(const json& j, int line_no) {
  if (!j.is_object())
    throw SchemaViolation("line " + std::to_string(line_no) +
                          ": record must be a JSON object");
  AnnotationRecord r;

  const json& image_id = require_field(j, "image_id", line_no);
  const json& class_id = require_field(j, "class_id", line_no);
  if (!image_id.is_string() || !class_id.is_string())
    throw SchemaViolation("line " + std::to_string(line_no) +
                          ": image_id and class_id must be strings");
  r.image_id = image_id.get<std::string>();
  r.class_id = class_id.get<std::string>();

  const std::vector<double> rot = number_array(j, "rotation", 9, line_no);
  Mat3 m;
  std::copy(rot.begin(), rot.end(), m.begin());
  try {
    r.pose.rotation = Rotation::from_matrix(m);
  } catch (const NotARotation& e) {
    throw InvalidRotation("line " + std::to_string(line_no) + ": " + e.what());
  }

  const std::vector<double> t = number_array(j, "translation_mm", 3, line_no);
  r.pose.translation = {t[0], t[1], t[2]};

  const std::vector<double> c = number_array(j, "cube_mm", 24, line_no);
  for (std::size_t i = 0; i < 8; ++i)
    r.cube.vertices[i] = {c[3 * i], c[3 * i + 1], c[3 * i + 2]};
  if (!is_parallelepiped(r.cube))
    throw SchemaViolation("line " + std::to_string(line_no) +
                          ": cube_mm vertices do not form a parallelepiped");

  const json& symmetric = require_field(j, "symmetric", line_no);
  if (!symmetric.is_boolean())
    throw SchemaViolation("line " + std::to_string(line_no) +
                          ": symmetric must be a boolean");
  r.symmetric = symmetric.get<bool>();

  const json& source = require_field(j, "source", line_no);
  if (!source.is_string() ||
      (source.get<std::string>() != "gt" && source.get<std::string>() != "pred"))
    throw SchemaViolation("line " + std::to_string(line_no) +
                          ": source must be \"gt\" or \"pred\"");
  r.source = source.get<std::string>() == "gt" ? Source::GroundTruth
                                               : Source::Prediction;
  return r;
}

}  // namespace

std::vector<AnnotationRecord> read_annotations(std::istream& in) {
  std::vector<AnnotationRecord> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaViolation("line " + std::to_string(line_no) +
                            ": invalid JSON: " + e.what());
    }
    out.push_back(record_from_json(j, line_no));
  }
  return out;
}

void write_annotations(const std::vector<AnnotationRecord>& records,
                       std::ostream& out) {
  for (const AnnotationRecord& r : records) {
    nlohmann::ordered_json j;
    j["image_id"] = r.image_id;
    j["class_id"] = r.class_id;
    j["rotation"] = r.pose.rotation.m;
    j["translation_mm"] = {r.pose.translation.x, r.pose.translation.y,
                           r.pose.translation.z};
    std::vector<double> cube;
    cube.reserve(24);
    for (const Vec3& v : r.cube.vertices) {
      cube.push_back(v.x);
      cube.push_back(v.y);
      cube.push_back(v.z);
    }
    j["cube_mm"] = cube;
    j["symmetric"] = r.symmetric;
    j["source"] = r.source == Source::GroundTruth ? "gt" : "pred";
    out << j.dump() << '\n';
  }
}

ClassPrior class_prior(const std::vector<BoundingCube>& cubes,
                       const std::string& class_id) {
  if (cubes.empty()) throw EmptyInput("class_prior needs at least one cube");
  Vec3 lo_sum, hi_sum;
  for (const BoundingCube& c : cubes) {
    const Vec3 ctr = cube_centroid(c);
    Vec3 lo = c.vertices[0] - ctr, hi = c.vertices[0] - ctr;
    for (const Vec3& v : c.vertices) {
      const Vec3 d = v - ctr;
      lo = {std::min(lo.x, d.x), std::min(lo.y, d.y), std::min(lo.z, d.z)};
      hi = {std::max(hi.x, d.x), std::max(hi.y, d.y), std::max(hi.z, d.z)};
    }
    lo_sum += lo;
    hi_sum += hi;
  }
  const double n = static_cast<double>(cubes.size());
  ClassPrior prior;
  prior.class_id = class_id;
  prior.prior_cube = cube_from_aabb(lo_sum / n, hi_sum / n);
  prior.avg_diameter = diameter(cube_points(prior.prior_cube));
  return prior;
}

}  // namespace cubepose
