#include <doctest.h>

#include <cstring>
#include <filesystem>

#include "binpick/io.hpp"
#include "binpick/json_io.hpp"
#include "binpick/rng.hpp"

using namespace binpick;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "binpick_unit_io";
  fs::create_directories(dir);
  return dir / name;
}

std::vector<std::uint8_t> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

// Hand-assembled container: magic, u32 LE length, header, payload.
std::vector<std::uint8_t> container(const std::string& header, std::size_t payload_bytes) {
  std::vector<std::uint8_t> out = bytes_of("GRSPTNSR");
  const auto n = static_cast<std::uint32_t>(header.size());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(n >> (8 * i)));
  out.insert(out.end(), header.begin(), header.end());
  out.resize(out.size() + payload_bytes, 0);
  return out;
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("tensor container layout") {
    const std::vector<io::NamedTensor> t = {{"a", {2}, {1.0f, -2.5f}}, {"b", {1, 1}, {3.0f}}};
    const auto bytes = io::encode_tensors(t);
    CHECK(std::memcmp(bytes.data(), "GRSPTNSR", 8) == 0);
    const std::uint32_t n = bytes[8] | bytes[9] << 8 | bytes[10] << 16 | static_cast<std::uint32_t>(bytes[11]) << 24;
    const std::string header(bytes.begin() + 12, bytes.begin() + 12 + n);
    CHECK(header ==
          R"({"tensors":[{"byte_offset":0,"dtype":"f32","name":"a","shape":[2]},{"byte_offset":8,"dtype":"f32","name":"b","shape":[1,1]}]})");
    CHECK(bytes.size() == 12 + n + 12);
    float v = 0.0f;
    std::memcpy(&v, bytes.data() + 12 + n + 4, 4);
    CHECK(v == -2.5f);
  }

  TEST_CASE("tensor round trip is byte identical") {
    Rng rng(1);
    std::vector<io::NamedTensor> t = {{"x", {3, 4, 5}, {}}, {"y", {7}, {}}};
    for (auto& n : t)
      for (std::size_t i = 0; i < n.element_count(); ++i) n.data.push_back(static_cast<float>(rng.normal(0, 1)));
    const auto a = io::encode_tensors(t);
    const auto back = io::decode_tensors(a);
    REQUIRE(back.size() == 2);
    CHECK(back[0].shape == t[0].shape);
    CHECK(back[0].data == t[0].data);
    CHECK(io::encode_tensors(back) == a);
    const fs::path p = scratch("t.tensor");
    io::write_tensors(p, t);
    CHECK(io::read_bytes(p) == a);
    CHECK_THROWS_AS(io::find_tensor(back, "z"), FormatError);
  }

  TEST_CASE("malformed containers are rejected") {
    CHECK_THROWS_AS(io::decode_tensors(bytes_of("GRSP")), FormatError);
    CHECK_THROWS_AS(io::decode_tensors(container("{}", 0)), FormatError);
    auto bad_magic = container(R"({"tensors":[]})", 0);
    bad_magic[0] = 'X';
    CHECK_THROWS_AS(io::decode_tensors(bad_magic), FormatError);
    auto long_header = container(R"({"tensors":[]})", 0);
    long_header[8] = 0xff;
    CHECK_THROWS_AS(io::decode_tensors(long_header), FormatError);
    CHECK_THROWS_AS(io::decode_tensors(container(R"({"tensors":[{"name":"a","dtype":"f32","shape":[4],"byte_offset":0}]})", 8)),
                    FormatError);
    CHECK_THROWS_AS(io::decode_tensors(container(R"({"tensors":[{"name":"a","dtype":"f64","shape":[1],"byte_offset":0}]})", 8)),
                    FormatError);
    CHECK_THROWS_AS(io::decode_tensors(container(R"({"tensors":[{"name":"a","dtype":"f32","shape":[0],"byte_offset":0}]})", 8)),
                    FormatError);
    CHECK_THROWS_AS(
        io::decode_tensors(container(
            R"({"tensors":[{"name":"a","dtype":"f32","shape":[2],"byte_offset":0},{"name":"b","dtype":"f32","shape":[2],"byte_offset":4}]})",
            16)),
        FormatError);
    CHECK_THROWS_AS(io::decode_tensors(container("not json", 0)), FormatError);
  }

  TEST_CASE("depth and affordance files") {
    DepthImage d(5, 4, 0.5f);
    d.at(1, 1) = 0.0f;
    const fs::path p = scratch("depth.tensor");
    io::write_depth(p, d);
    const DepthImage r = io::read_depth(p);
    CHECK(std::equal(d.data().begin(), d.data().end(), r.data().begin(), r.data().end()));

    AffordanceBundle b{Tensor3(3, 4, 5, 1.0f / 3), Tensor3(3, 4, 5, 1.0f / 3), Tensor3(12, 4, 5, 1.0f / 12)};
    const fs::path q = scratch("aff.tensor");
    io::write_affordance(q, b);
    const auto before = io::read_bytes(q);
    io::write_affordance(q, io::read_affordance(q));
    CHECK(io::read_bytes(q) == before);

    io::write_tensors(q, {{"suction", {3, 4, 5}, std::vector<float>(60, 0.3f)},
                          {"finger", {3, 4, 6}, std::vector<float>(72, 0.3f)},
                          {"angle", {12, 4, 5}, std::vector<float>(240, 0.1f)}});
    CHECK_THROWS_AS(io::read_affordance(q), ShapeMismatchError);
  }

  TEST_CASE("png round trips") {
    Rng rng(2);
    RgbImage img(13, 7);
    for (auto& v : img.data) v = static_cast<std::uint8_t>(rng.below(256));
    const fs::path p = scratch("rgb.png");
    io::write_png(p, img);
    CHECK(io::read_png_rgb(p) == img);
    const auto first = io::read_bytes(p);
    io::write_png(p, io::read_png_rgb(p));
    CHECK(io::read_bytes(p) == first);

    LabelImage l(9, 6, 0);
    for (std::size_t i = 0; i < l.data.size(); ++i) l.data[i] = std::array<std::uint8_t, 4>{0, 1, 2, 255}[i % 4];
    const fs::path q = scratch("labels.png");
    io::write_label_png(q, l);
    CHECK(io::read_label_png(q) == l);
    const auto lb = io::read_bytes(q);
    io::write_label_png(q, io::read_label_png(q));
    CHECK(io::read_bytes(q) == lb);

    io::write_text(scratch("junk.png"), "nope");
    CHECK_THROWS_AS(io::read_png_rgb(scratch("junk.png")), FormatError);
  }

  TEST_CASE("pose json") {
    const Pose p = Pose::from_quaternion(0.9, 0.1, -0.3, 0.2, Vec3(0.1, -0.2, 0.7));
    const io::Json j = io::to_json(p);
    CHECK(j.at("convention") == "world_to_camera");
    CHECK(io::pose_from_json(j).approx(p, 1e-15));
    const std::string text = io::dump(j);
    CHECK(io::dump(io::to_json(io::pose_from_json(io::parse_json(text, "pose")))) == text);

    io::Json inv = io::to_json(p.inverse(), "camera_to_world");
    CHECK(io::pose_from_json(inv).approx(p, 1e-12));
    io::Json quat_only = {{"quaternion_wxyz", {1, 0, 0, 0}}, {"translation", {1, 2, 3}}};
    CHECK(io::pose_from_json(quat_only).approx(Pose::translation(Vec3(1, 2, 3)), 0.0));
    CHECK_THROWS_AS(io::pose_from_json(io::Json{{"translation", {1, 2}}}), FormatError);
    CHECK_THROWS_AS(io::pose_from_json(io::Json{{"quaternion_wxyz", {1, 0, 0, 0}}, {"translation", {0, 0, 0}},
                                                {"convention", "sideways"}}),
                    FormatError);
  }

  TEST_CASE("plan document round trip") {
    io::PlanDocument doc;
    doc.plan = magnetic_sequence(Pose::translation(Vec3(-0.1, 0, 0.3)), Pose::rot_z(20, Vec3(0.1, 0.1, 0.05)),
                                 Pose::translation(Vec3(0.5, 0, 0.3)));
    doc.plan.steps.push_back(step::Push{Vec3(0.6, 0.8, 0), 0.05});
    doc.plan.reduced_speed = true;
    doc.selection = {GraspMode::kFinger, Pixel{3, 4}, 0.75, -15.0};
    doc.region = "corner(-x,-y)";
    doc.provenance.input_hashes = {{"depth", "0123456789abcdef"}};
    const std::string text = io::dump(io::to_json(doc));
    const io::PlanDocument back = io::plan_document_from_json(io::parse_json(text, "plan"));
    CHECK(back.plan.steps.size() == doc.plan.steps.size());
    CHECK(back.plan.mode == PlanMode::kMagnetic);
    CHECK(back.selection.pixel == Pixel{3, 4});
    CHECK(io::dump(io::to_json(back)) == text);
    const io::Json j = io::parse_json(text, "plan");
    CHECK(j.at("version") == std::string(io::kToolVersion));
    CHECK(j.at("plan").at("steps").at(0).at("kind") == "set_config");
  }

  TEST_CASE("scenario and scene round trips") {
    io::Scenario s;
    s.scene.corner_bias = 0.5;
    s.policy.greedy = true;
    s.seed = 99;
    const std::string text = io::dump(io::to_json(s));
    CHECK(io::dump(io::to_json(io::scenario_from_json(io::parse_json(text, "scenario")))) == text);
    CHECK(io::scenario_from_json(io::Json::object()).scene.object_count == 10);
    CHECK_THROWS_AS(io::scenario_from_json(io::Json{{"colour", 1}}), FormatError);
    CHECK_THROWS_AS(io::scenario_from_json(io::Json{{"bin", {{"margin", 0.5}}}}), DomainError);

    const Scene scene = generate_scene(5, s.scene, s.bin);
    const std::string st = io::dump(io::to_json(scene));
    CHECK(io::dump(io::to_json(io::scene_from_json(io::parse_json(st, "scene")))) == st);
  }

  TEST_CASE("fnv1a") {
    CHECK(io::fnv1a_hex({}) == "cbf29ce484222325");
    CHECK(io::fnv1a_hex(bytes_of("a")) == "af63dc4c8601ec8c");
  }

  TEST_CASE("ply export") {
    Scene s;
    s.objects.push_back(SceneObject{1, ShapeKind::kBox, Vec3(0.1, 0.05, 0.02), Pose::translation(Vec3(0.2, 0.15, 0.01))});
    s.objects.push_back(
        SceneObject{2, ShapeKind::kCylinder, Vec3(0.01, 0.08, 0), Pose::translation(Vec3(0.1, 0.1, 0.01))});
    const std::string ply = io::scene_ply(s, std::nullopt, {}, {});
    // floor + 4 walls + box = 6 boxes of 8 vertices and 6 faces; cylinder 32 vertices, 18 faces
    CHECK(ply.find("element vertex 80\n") != std::string::npos);
    CHECK(ply.find("element face 54\n") != std::string::npos);
    const std::string with_gripper = io::scene_ply(s, Pose(top_down_rotation(0), Vec3(0.2, 0.15, 0.02)),
                                                   configs::kSuctionApproach, {});
    CHECK(with_gripper.size() > ply.size());
  }

  TEST_CASE("missing files") {
    CHECK_THROWS_AS(io::read_bytes(scratch("does_not_exist")), FormatError);
  }
}
