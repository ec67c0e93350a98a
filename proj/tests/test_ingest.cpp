#include <cstring>
#include <sstream>
#include <string>
#include <vector>

#include "cubepose/ingest.hpp"
#include "cubepose/rng.hpp"
#include "doctest.h"

using namespace cubepose;

namespace {

void append_f32(std::string& out, float v) {
  char buf[4];
  std::memcpy(buf, &v, 4);
  out.append(buf, 4);
}

void append_u8(std::string& out, std::uint8_t v) {
  out.push_back(static_cast<char>(v));
}

void append_i32(std::string& out, std::int32_t v) {
  char buf[4];
  std::memcpy(buf, &v, 4);
  out.append(buf, 4);
}

std::string ascii_ply(const std::vector<Vec3>& pts,
                      const std::vector<std::vector<std::uint32_t>>& faces = {}) {
  std::ostringstream ss;
  ss.precision(17);
  ss << "ply\nformat ascii 1.0\ncomment synthetic fixture\n";
  ss << "element vertex " << pts.size() << "\n";
  ss << "property float x\nproperty float y\nproperty float z\n";
  if (!faces.empty()) {
    ss << "element face " << faces.size() << "\n";
    ss << "property list uchar int vertex_indices\n";
  }
  ss << "end_header\n";
  for (const Vec3& p : pts) ss << p.x << " " << p.y << " " << p.z << "\n";
  for (const auto& f : faces) {
    ss << f.size();
    for (const auto idx : f) ss << " " << idx;
    ss << "\n";
  }
  return ss.str();
}

std::string binary_ply(const std::vector<Vec3>& pts,
                       const std::vector<std::vector<std::uint32_t>>& faces = {}) {
  std::string out =
      "ply\nformat binary_little_endian 1.0\n"
      "element vertex " + std::to_string(pts.size()) + "\n"
      "property float x\nproperty float y\nproperty float z\n";
  if (!faces.empty()) {
    out += "element face " + std::to_string(faces.size()) + "\n";
    out += "property list uchar int vertex_indices\n";
  }
  out += "end_header\n";
  for (const Vec3& p : pts) {
    append_f32(out, static_cast<float>(p.x));
    append_f32(out, static_cast<float>(p.y));
    append_f32(out, static_cast<float>(p.z));
  }
  for (const auto& f : faces) {
    append_u8(out, static_cast<std::uint8_t>(f.size()));
    for (const auto idx : f) append_i32(out, static_cast<std::int32_t>(idx));
  }
  return out;
}

// coordinates exactly representable as float32 so both formats agree bitwise
std::vector<Vec3> dyadic_cloud(std::mt19937_64& gen, int n) {
  std::vector<Vec3> pts;
  for (int i = 0; i < n; ++i) {
    const auto q = [&] {
      return (static_cast<double>(gen() % 65536) - 32768.0) / 256.0;
    };
    pts.push_back({q(), q(), q()});
  }
  return pts;
}

}  // namespace

TEST_CASE("minimal ascii ply parses the declared vertices") {
  const std::string src =
      "ply\nformat ascii 1.0\nelement vertex 3\n"
      "property float x\nproperty float y\nproperty float z\n"
      "end_header\n0 0 0\n1 0 0\n0 1 0\n";
  const MeshModel m = parse_ply(src);
  REQUIRE(m.vertices.size() == 3);
  CHECK(m.vertices[0].x == 0.0);
  CHECK(m.vertices[1].x == 1.0);
  CHECK(m.vertices[1].y == 0.0);
  CHECK(m.vertices[2].y == 1.0);
  CHECK(m.faces.empty());
}

TEST_CASE("ascii and binary bodies of one geometry parse identically") {
  std::mt19937_64 gen(11);
  const std::vector<Vec3> pts = dyadic_cloud(gen, 50);
  const std::vector<std::vector<std::uint32_t>> faces{{0, 1, 2}, {3, 4, 5, 6}};

  const MeshModel a = parse_ply(ascii_ply(pts, faces));
  const MeshModel b = parse_ply(binary_ply(pts, faces));
  REQUIRE(a.vertices.size() == 50);
  REQUIRE(b.vertices.size() == 50);
  for (std::size_t i = 0; i < 50; ++i) {
    CHECK(std::memcmp(&a.vertices[i], &b.vertices[i], sizeof(Vec3)) == 0);
    CHECK(a.vertices[i].x == pts[i].x);
    CHECK(a.vertices[i].y == pts[i].y);
    CHECK(a.vertices[i].z == pts[i].z);
  }
  REQUIRE(a.faces.size() == 2);
  CHECK(a.faces == b.faces);
  CHECK(a.faces[1] == std::vector<std::uint32_t>{3, 4, 5, 6});
}

TEST_CASE("unknown properties and foreign elements are skipped") {
  SUBCASE("ascii") {
    const std::string src =
        "ply\nformat ascii 1.0\n"
        "element vertex 2\n"
        "property float nx\nproperty float x\nproperty float y\n"
        "property float z\nproperty uchar red\n"
        "element edge 1\nproperty int v1\nproperty int v2\n"
        "element face 1\nproperty list uchar int vertex_indices\n"
        "end_header\n"
        "9 1 2 3 255\n9 4 5 6 128\n"
        "0 1\n"
        "3 0 1 1\n";
    const MeshModel m = parse_ply(src);
    REQUIRE(m.vertices.size() == 2);
    CHECK(m.vertices[0].x == 1.0);
    CHECK(m.vertices[0].z == 3.0);
    CHECK(m.vertices[1].y == 5.0);
    REQUIRE(m.faces.size() == 1);
    CHECK(m.faces[0] == std::vector<std::uint32_t>{0, 1, 1});
  }
  SUBCASE("binary") {
    std::string src =
        "ply\nformat binary_little_endian 1.0\n"
        "element vertex 2\n"
        "property float nx\nproperty float x\nproperty float y\n"
        "property float z\nproperty uchar red\n"
        "element face 1\nproperty list uchar int vertex_indices\n"
        "end_header\n";
    const std::vector<std::array<float, 4>> rows{{9, 1, 2, 3}, {9, 4, 5, 6}};
    for (const auto& row : rows) {
      for (const float v : row) append_f32(src, v);
      append_u8(src, 255);
    }
    append_u8(src, 3);
    append_i32(src, 0);
    append_i32(src, 1);
    append_i32(src, 1);
    const MeshModel m = parse_ply(src);
    REQUIRE(m.vertices.size() == 2);
    CHECK(m.vertices[0].x == 1.0);
    CHECK(m.vertices[1].z == 6.0);
    REQUIRE(m.faces.size() == 1);
    CHECK(m.faces[0] == std::vector<std::uint32_t>{0, 1, 1});
  }
}

TEST_CASE("ply header failures") {
  CHECK_THROWS_AS(parse_ply("not a ply\n"), MalformedHeader);
  CHECK_THROWS_AS(parse_ply("ply\nformat binary_big_endian 1.0\n"
                            "element vertex 1\nproperty float x\n"
                            "property float y\nproperty float z\nend_header\n"),
                  UnsupportedFormat);
  CHECK_THROWS_AS(parse_ply("ply\nformat utf8 1.0\nend_header\n"), MalformedHeader);
  CHECK_THROWS_AS(parse_ply("ply\nformat ascii 2.0\nend_header\n"), MalformedHeader);
  // no vertex element
  CHECK_THROWS_AS(parse_ply("ply\nformat ascii 1.0\nelement face 0\n"
                            "property list uchar int vertex_indices\nend_header\n"),
                  MalformedHeader);
  // missing z
  CHECK_THROWS_AS(parse_ply("ply\nformat ascii 1.0\nelement vertex 1\n"
                            "property float x\nproperty float y\nend_header\n1 2\n"),
                  MalformedHeader);
  // integer coordinates are not an accepted vertex layout
  CHECK_THROWS_AS(parse_ply("ply\nformat ascii 1.0\nelement vertex 1\n"
                            "property int x\nproperty float y\nproperty float z\n"
                            "end_header\n1 2 3\n"),
                  MalformedHeader);
  CHECK_THROWS_AS(parse_ply("ply\nformat ascii 1.0\nproperty float x\n"),
                  MalformedHeader);
  CHECK_THROWS_AS(parse_ply("ply\nformat ascii 1.0\nelement vertex 1\n"
                            "property float x\nproperty float y\nproperty float z\n"),
                  MalformedHeader);  // no end_header
  // zero vertices cannot form a mesh
  CHECK_THROWS_AS(parse_ply("ply\nformat ascii 1.0\nelement vertex 0\n"
                            "property float x\nproperty float y\nproperty float z\n"
                            "end_header\n"),
                  MalformedHeader);
}

TEST_CASE("ply body failures") {
  // declared 10, provided 9
  std::string src =
      "ply\nformat ascii 1.0\nelement vertex 10\n"
      "property float x\nproperty float y\nproperty float z\nend_header\n";
  for (int i = 0; i < 9; ++i) src += "1 2 3\n";
  CHECK_THROWS_AS(parse_ply(src), TruncatedBody);

  CHECK_THROWS_AS(parse_ply("ply\nformat ascii 1.0\nelement vertex 1\n"
                            "property float x\nproperty float y\nproperty float z\n"
                            "end_header\n1 banana 3\n"),
                  MalformedBody);

  // binary body one byte short
  std::string bin =
      "ply\nformat binary_little_endian 1.0\nelement vertex 1\n"
      "property float x\nproperty float y\nproperty float z\nend_header\n";
  append_f32(bin, 1.0f);
  append_f32(bin, 2.0f);
  bin += "\x00\x00\x00";  // 3 of the 4 bytes of z
  CHECK_THROWS_AS(parse_ply(bin), TruncatedBody);

  // face index past the vertex count
  CHECK_THROWS_AS(parse_ply("ply\nformat ascii 1.0\nelement vertex 2\n"
                            "property float x\nproperty float y\nproperty float z\n"
                            "element face 1\nproperty list uchar int vertex_indices\n"
                            "end_header\n0 0 0\n1 1 1\n3 0 1 2\n"),
                  MalformedBody);
}

TEST_CASE("mesh_cube wraps the vertices") {
  SUBCASE("unit cube is its own bounding cube") {
    MeshModel m;
    for (const Vec3& v : cube_points(cube_from_aabb({0, 0, 0}, {1, 1, 1})))
      m.vertices.push_back(v);
    const BoundingCube c = mesh_cube(m);
    const BoundingCube expect = cube_from_aabb({0, 0, 0}, {1, 1, 1});
    for (std::size_t i = 0; i < 8; ++i) {
      CHECK(c.vertices[i].x == expect.vertices[i].x);
      CHECK(c.vertices[i].y == expect.vertices[i].y);
      CHECK(c.vertices[i].z == expect.vertices[i].z);
    }
  }
  SUBCASE("single vertex gives a degenerate cube") {
    MeshModel m;
    m.vertices.push_back({3, 4, 5});
    const BoundingCube c = mesh_cube(m);
    for (const Vec3& v : c.vertices) {
      CHECK(v.x == 3.0);
      CHECK(v.y == 4.0);
      CHECK(v.z == 5.0);
    }
    CHECK(volume(c) == 0.0);
  }
  SUBCASE("random cloud is contained") {
    std::mt19937_64 gen(5);
    MeshModel m;
    for (int i = 0; i < 500; ++i)
      m.vertices.push_back(uniform_in_box(gen, {-80, -10, -400}, {120, 90, -20}));
    const BoundingCube c = mesh_cube(m);
    Vec3 lo = c.vertices[0], hi = c.vertices[0];
    for (const Vec3& v : c.vertices) {
      lo = {std::min(lo.x, v.x), std::min(lo.y, v.y), std::min(lo.z, v.z)};
      hi = {std::max(hi.x, v.x), std::max(hi.y, v.y), std::max(hi.z, v.z)};
    }
    for (const Vec3& v : m.vertices) {
      CHECK(v.x >= lo.x);
      CHECK(v.x <= hi.x);
      CHECK(v.y >= lo.y);
      CHECK(v.y <= hi.y);
      CHECK(v.z >= lo.z);
      CHECK(v.z <= hi.z);
    }
  }
  SUBCASE("empty mesh is rejected") {
    CHECK_THROWS_AS(mesh_cube(MeshModel{}), TooFewPoints);
  }
}

TEST_CASE("kitti label line parses field-for-field") {
  const KittiAnnotation a = parse_kitti_label(
      "Car 0.00 0 -1.58 587.01 173.33 614.12 200.12 1.65 1.67 3.64 "
      "-0.65 1.71 46.70 -1.59");
  CHECK(a.type == "Car");
  CHECK(a.truncated == 0.0);
  CHECK(a.occluded == 0);
  CHECK(a.alpha == -1.58);
  CHECK(a.bbox2d[0] == 587.01);
  CHECK(a.bbox2d[3] == 200.12);
  CHECK(a.h == 1.65);
  CHECK(a.w == 1.67);
  CHECK(a.l == 3.64);
  CHECK(a.location.x == -0.65);
  CHECK(a.location.y == 1.71);
  CHECK(a.location.z == 46.70);
  CHECK(a.rotation_y == -1.59);
  CHECK_FALSE(a.score.has_value());
  CHECK_FALSE(a.dont_care());
}

TEST_CASE("kitti DontCare and score variants") {
  const KittiAnnotation d = parse_kitti_label(
      "DontCare -1 -1 -10 100 100 200 200 -1 -1 -1 -1000 -1000 -1000 -10");
  CHECK(d.dont_care());
  CHECK(d.occluded == -1);
  CHECK(d.h == -1.0);

  const KittiAnnotation p = parse_kitti_label(
      "Pedestrian 0 1 0.5 1 2 3 4 1.8 0.6 0.9 5 1.6 20 0.3 0.92");
  REQUIRE(p.score.has_value());
  CHECK(*p.score == 0.92);
}

TEST_CASE("kitti parse guards") {
  CHECK_THROWS_AS(parse_kitti_label("Car 0.00 0 -1.58 587.01 173.33 614.12 "
                                    "200.12 1.65 1.67 3.64 -0.65 1.71 46.70"),
                  WrongFieldCount);
  CHECK_THROWS_AS(parse_kitti_label(""), WrongFieldCount);
  CHECK_THROWS_AS(
      parse_kitti_label("Car 0.00 0 -1.58 587.01 173.33 614.12 200.12 1.65 "
                        "1.67 3.64 -0.65 1.71 46.70 -1.59 0.5 0.6"),
      WrongFieldCount);
  CHECK_THROWS_AS(parse_kitti_label("Car 0.00 0 -1.58 587.01 173.33 614.12 "
                                    "200.12 tall 1.67 3.64 -0.65 1.71 46.70 -1.59"),
                  NonNumericField);
}

TEST_CASE("kitti line round-trips through format and parse") {
  std::mt19937_64 gen(23);
  for (int i = 0; i < 20; ++i) {
    KittiAnnotation a;
    a.type = i % 2 ? "Car" : "Cyclist";
    a.truncated = uniform01(gen);
    a.occluded = static_cast<int>(gen() % 4);
    a.alpha = uniform_range(gen, -kPi, kPi);
    a.bbox2d = {uniform_range(gen, 0, 500), uniform_range(gen, 0, 200),
                uniform_range(gen, 500, 1000), uniform_range(gen, 200, 370)};
    a.h = uniform_range(gen, 0.5, 3);
    a.w = uniform_range(gen, 0.5, 3);
    a.l = uniform_range(gen, 0.5, 8);
    a.location = uniform_in_box(gen, {-30, -2, 3}, {30, 3, 90});
    a.rotation_y = uniform_range(gen, -kPi, kPi);
    if (i % 3 == 0) a.score = uniform01(gen);

    const KittiAnnotation b = parse_kitti_label(format_kitti_label(a));
    CHECK(b.type == a.type);
    CHECK(b.truncated == a.truncated);
    CHECK(b.occluded == a.occluded);
    CHECK(b.alpha == a.alpha);
    for (int k = 0; k < 4; ++k) CHECK(b.bbox2d[k] == a.bbox2d[k]);
    CHECK(b.h == a.h);
    CHECK(b.w == a.w);
    CHECK(b.l == a.l);
    CHECK(b.location.x == a.location.x);
    CHECK(b.location.y == a.location.y);
    CHECK(b.location.z == a.location.z);
    CHECK(b.rotation_y == a.rotation_y);
    CHECK(b.score.has_value() == a.score.has_value());
    if (a.score) CHECK(*b.score == *a.score);
  }
}

TEST_CASE("kitti_to_record converts frames and units") {
  const KittiAnnotation a = parse_kitti_label(
      "Car 0.00 0 -1.58 587.01 173.33 614.12 200.12 1.65 1.67 3.64 "
      "-0.65 1.71 46.70 -1.59");
  const AnnotationRecord r = kitti_to_record(a, "000123");
  CHECK(r.image_id == "000123");
  CHECK(r.class_id == "Car");
  CHECK(r.source == Source::GroundTruth);
  CHECK_FALSE(r.symmetric);

  CHECK(volume(r.cube) == doctest::Approx(1.0031e10).epsilon(1e-3));
  CHECK(volume(r.cube) == doctest::Approx(3640.0 * 1650.0 * 1670.0).epsilon(1e-12));

  // bottom-center convention: y spans [-h, 0]
  Vec3 lo = r.cube.vertices[0], hi = r.cube.vertices[0];
  for (const Vec3& v : r.cube.vertices) {
    lo = {std::min(lo.x, v.x), std::min(lo.y, v.y), std::min(lo.z, v.z)};
    hi = {std::max(hi.x, v.x), std::max(hi.y, v.y), std::max(hi.z, v.z)};
  }
  CHECK(lo.x == doctest::Approx(-1820.0));
  CHECK(hi.x == doctest::Approx(1820.0));
  CHECK(lo.y == doctest::Approx(-1650.0));
  CHECK(hi.y == doctest::Approx(0.0));
  CHECK(lo.z == doctest::Approx(-835.0));
  CHECK(hi.z == doctest::Approx(835.0));

  CHECK(r.pose.translation.x == doctest::Approx(-650.0));
  CHECK(r.pose.translation.y == doctest::Approx(1710.0));
  CHECK(r.pose.translation.z == doctest::Approx(46700.0));

  // yaw about the camera y-axis
  const Mat3& m = r.pose.rotation.m;
  CHECK(m[0] == doctest::Approx(std::cos(-1.59)));
  CHECK(m[2] == doctest::Approx(std::sin(-1.59)));
  CHECK(m[4] == 1.0);
  CHECK(m[6] == doctest::Approx(-std::sin(-1.59)));

  SUBCASE("identity yaw and pure translation") {
    KittiAnnotation b = a;
    b.rotation_y = 0.0;
    b.location = {0, 0, 10};
    const AnnotationRecord rb = kitti_to_record(b, "1");
    for (int i = 0; i < 9; ++i)
      CHECK(rb.pose.rotation.m[i] == (i % 4 == 0 ? 1.0 : 0.0));
    CHECK(rb.pose.translation.z == 10000.0);
  }
  SUBCASE("DontCare is rejected") {
    const KittiAnnotation d = parse_kitti_label(
        "DontCare -1 -1 -10 100 100 200 200 -1 -1 -1 -1000 -1000 -1000 -10");
    CHECK_THROWS_AS(kitti_to_record(d, "1"), DontCareRecord);
  }
}

namespace {

AnnotationRecord random_record(std::mt19937_64& gen, int i) {
  AnnotationRecord r;
  r.image_id = "img_" + std::to_string(i / 3);
  r.class_id = "class_" + std::to_string(i % 5);
  r.pose.rotation = random_rotation(gen);
  r.pose.translation = uniform_in_box(gen, {-900, -900, 200}, {900, 900, 2500});
  const Vec3 half{uniform_range(gen, 10, 200), uniform_range(gen, 10, 200),
                  uniform_range(gen, 10, 200)};
  r.cube = cube_from_aabb(-half, half);
  r.symmetric = (i % 4) == 0;
  r.source = (i % 2) ? Source::Prediction : Source::GroundTruth;
  return r;
}

}  // namespace

TEST_CASE("annotation jsonl round-trips exactly") {
  std::istringstream empty("");
  CHECK(read_annotations(empty).empty());

  std::mt19937_64 gen(31);
  std::vector<AnnotationRecord> records;
  for (int i = 0; i < 100; ++i) records.push_back(random_record(gen, i));

  std::ostringstream out;
  write_annotations(records, out);
  std::istringstream in(out.str());
  const std::vector<AnnotationRecord> back = read_annotations(in);

  REQUIRE(back.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(back[i].image_id == records[i].image_id);
    CHECK(back[i].class_id == records[i].class_id);
    CHECK(back[i].symmetric == records[i].symmetric);
    CHECK(back[i].source == records[i].source);
    for (int k = 0; k < 9; ++k)
      CHECK(back[i].pose.rotation.m[k] == records[i].pose.rotation.m[k]);
    CHECK(norm(back[i].pose.translation - records[i].pose.translation) < 1e-12);
    for (std::size_t v = 0; v < 8; ++v)
      CHECK(norm(back[i].cube.vertices[v] - records[i].cube.vertices[v]) < 1e-12);
  }

  // a second write of the re-read records is byte-identical
  std::ostringstream out2;
  write_annotations(back, out2);
  CHECK(out.str() == out2.str());
}

TEST_CASE("annotation schema violations carry line numbers") {
  const std::string good =
      R"({"image_id":"a","class_id":"c","rotation":[1,0,0,0,1,0,0,0,1],)"
      R"("translation_mm":[0,0,0],"cube_mm":[0,0,0, 1,0,0, 1,1,0, 0,1,0, 0,0,1, 1,0,1, 1,1,1, 0,1,1],)"
      R"("symmetric":false,"source":"gt"})";

  SUBCASE("blank lines are skipped") {
    std::istringstream in(good + "\n\n" + good + "\n");
    CHECK(read_annotations(in).size() == 2);
  }
  SUBCASE("invalid json") {
    std::istringstream in(good + "\n{oops\n");
    CHECK_THROWS_WITH_AS(read_annotations(in),
                         doctest::Contains("line 2"), SchemaViolation);
  }
  SUBCASE("missing field") {
    std::string bad = good;
    const auto at = bad.find("\"symmetric\"");
    bad.erase(at, std::string("\"symmetric\":false,").size());
    std::istringstream in(good + "\n" + good + "\n" + bad + "\n");
    CHECK_THROWS_WITH_AS(read_annotations(in),
                         doctest::Contains("line 3"), SchemaViolation);
  }
  SUBCASE("wrong rotation arity") {
    std::string bad = good;
    const auto at = bad.find("[1,0,0,0,1,0,0,0,1]");
    bad.replace(at, std::string("[1,0,0,0,1,0,0,0,1]").size(), "[1,0,0]");
    std::istringstream in(bad);
    CHECK_THROWS_AS(read_annotations(in), SchemaViolation);
  }
  SUBCASE("reflection is not a rotation") {
    std::string bad = good;
    const auto at = bad.find("[1,0,0,0,1,0,0,0,1]");
    bad.replace(at, std::string("[1,0,0,0,1,0,0,0,1]").size(),
                "[1,0,0,0,1,0,0,0,-1]");
    std::istringstream in(good + "\n" + bad);
    CHECK_THROWS_WITH_AS(read_annotations(in),
                         doctest::Contains("line 2"), InvalidRotation);
  }
  SUBCASE("bad source string") {
    std::string bad = good;
    const auto at = bad.find("\"gt\"");
    bad.replace(at, 4, "\"truth\"");
    std::istringstream in(bad);
    CHECK_THROWS_AS(read_annotations(in), SchemaViolation);
  }
  SUBCASE("cube that is not a parallelepiped") {
    std::string bad = good;
    const auto at = bad.find("0,1,1]");
    bad.replace(at, std::string("0,1,1]").size(), "0,1,9]");
    std::istringstream in(bad);
    CHECK_THROWS_AS(read_annotations(in), SchemaViolation);
  }
  SUBCASE("non-boolean symmetric") {
    std::string bad = good;
    const auto at = bad.find("false");
    bad.replace(at, 5, "\"no\"");
    std::istringstream in(bad);
    CHECK_THROWS_AS(read_annotations(in), SchemaViolation);
  }
}

TEST_CASE("class_prior averages centered extents") {
  SUBCASE("single cube comes back re-centered") {
    const BoundingCube c = cube_from_aabb({10, 20, 30}, {40, 80, 150});
    const ClassPrior p = class_prior({c}, "duck");
    CHECK(p.class_id == "duck");
    const Vec3 ext = cube_extents(p.prior_cube);
    CHECK(ext.x == doctest::Approx(30));
    CHECK(ext.y == doctest::Approx(60));
    CHECK(ext.z == doctest::Approx(120));
    const Vec3 ctr = cube_centroid(p.prior_cube);
    CHECK(norm(ctr) < 1e-12);
  }
  SUBCASE("two cubes average their extents") {
    const BoundingCube a = cube_from_aabb({0, 0, 0}, {100, 100, 100});
    const BoundingCube b = cube_from_aabb({-300, 5, 7}, {-100, 205, 207});
    const ClassPrior p = class_prior({a, b});
    const Vec3 ext = cube_extents(p.prior_cube);
    CHECK(ext.x == doctest::Approx(150));
    CHECK(ext.y == doctest::Approx(150));
    CHECK(ext.z == doctest::Approx(150));
    CHECK(p.avg_diameter == doctest::Approx(150.0 * std::sqrt(3.0)).epsilon(1e-9));
    CHECK(p.avg_diameter == doctest::Approx(259.81).epsilon(1e-3));
  }
  SUBCASE("N identical cubes give that cube back") {
    const BoundingCube c = cube_from_aabb({-35, -20, -60}, {35, 20, 60});
    const ClassPrior p = class_prior({c, c, c, c, c});
    for (std::size_t i = 0; i < 8; ++i)
      CHECK(norm(p.prior_cube.vertices[i] - c.vertices[i]) < 1e-12);
    CHECK(p.avg_diameter ==
          doctest::Approx(diameter(cube_points(p.prior_cube))).epsilon(1e-9));
  }
  SUBCASE("empty input is rejected") {
    CHECK_THROWS_AS(class_prior({}), EmptyInput);
  }
}
