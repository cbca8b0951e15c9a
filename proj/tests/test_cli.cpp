#include <doctest.h>

#include <filesystem>
#include <iostream>
#include <sstream>

#include "binpick/cli.hpp"
#include "binpick/io.hpp"
#include "binpick/json_io.hpp"
#include "binpick/sim.hpp"

using namespace binpick;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "binpick");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  auto* old_out = std::cout.rdbuf(out.rdbuf());
  auto* old_err = std::cerr.rdbuf(err.rdbuf());
  const int code = cli::run(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / "binpick_unit_cli" / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

SceneObject make_box(double x, double y, Vec3 dims, MaterialClass m = MaterialClass::kOther) {
  SceneObject o;
  o.id = 1;
  o.dims = dims;
  o.pose = Pose::translation(Vec3(x, y, dims.z() / 2));
  o.mass = 0.1;
  o.material = m;
  o.graspable_width = std::min(dims.x(), dims.y());
  return o;
}

// Writes scene.json, camera.json, bin.json, intrinsics.json and rendered inputs into `dir`.
void write_inputs(const fs::path& dir, const Scene& scene) {
  const CameraSetup cam = top_down_camera(scene.bin);
  BinModel bin = scene.bin;
  bin.pose_cam_from_bin = cam.cam_from_bin;
  io::write_text(dir / "scene.json", io::dump(io::to_json(scene)));
  io::write_text(dir / "camera.json",
                 io::dump({{"pose", io::to_json(cam.cam_from_bin)}, {"intrinsics", io::to_json(cam.K)}}));
  io::write_text(dir / "bin.json", io::dump(io::to_json(bin)));
  io::write_text(dir / "intrinsics.json", io::dump(io::to_json(cam.K)));
  const auto r = run({"gen-affordance", "--scene", (dir / "scene.json").string(), "--camera",
                      (dir / "camera.json").string(), "--out", (dir / "aff.tensor").string(), "--depth-out",
                      (dir / "depth.tensor").string(), "--rgb-out", (dir / "rgb.png").string()});
  REQUIRE(r.code == 0);
}

std::vector<std::string> plan_args(const fs::path& dir) {
  return {"plan",     "--depth", (dir / "depth.tensor").string(), "--affordance", (dir / "aff.tensor").string(),
          "--bin",    (dir / "bin.json").string(),                "--camera",     (dir / "intrinsics.json").string(),
          "--out",    (dir / "plan.json").string()};
}

io::Json load(const fs::path& p) { return io::parse_json(io::read_text(p), p.string()); }

bool has_rotated_config(const io::Json& plan) {
  for (const auto& s : plan.at("plan").at("steps"))
    if (s.at("kind") == "set_config" && s.at("config").at("rotation") == "f_rot") return true;
  return false;
}

Scene single(const SceneObject& o) {
  Scene s;
  s.objects = {o};
  return s;
}

const char* kScenario = R"({"scene": {"object_count": 6, "corner_bias": 0.5}, "limits": {"max_attempts": 12}})";

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("plan: interior suction") {
    const fs::path d = fresh_dir("interior");
    write_inputs(d, single(make_box(0.2, 0.15, Vec3(0.1, 0.08, 0.04))));
    const Result r = run(plan_args(d));
    REQUIRE(r.code == 0);
    const io::Json j = load(d / "plan.json");
    CHECK(j.at("plan").at("mode") == "suction");
    CHECK(j.at("region") == "interior");
    CHECK(j.at("plan").at("expected_collision_free") == true);
  }

  TEST_CASE("plan: corner grasp gets rotated fingers") {
    const fs::path d = fresh_dir("corner");
    write_inputs(d, single(make_box(0.035, 0.035, Vec3(0.06, 0.06, 0.04))));
    REQUIRE(run(plan_args(d)).code == 0);
    const io::Json on = load(d / "plan.json");
    CHECK(on.at("region").get<std::string>().rfind("corner", 0) == 0);
    CHECK(has_rotated_config(on));
    CHECK(on.at("plan").at("mode") == "suction_ca");

    auto args = plan_args(d);
    args.push_back("--no-avoidance");
    REQUIRE(run(args).code == 0);
    const io::Json off = load(d / "plan.json");
    CHECK_FALSE(has_rotated_config(off));
    CHECK(off.at("provenance").at("avoidance") == false);
  }

  TEST_CASE("plan: transparent target uses gentle suction") {
    const fs::path d = fresh_dir("gentle");
    write_inputs(d, single(make_box(0.2, 0.15, Vec3(0.12, 0.1, 0.04), MaterialClass::kTransparent)));
    auto args = plan_args(d);
    args.insert(args.end(), {"--rgb", (d / "rgb.png").string()});
    REQUIRE(run(args).code == 0);
    const io::Json j = load(d / "plan.json");
    CHECK(j.at("plan").at("mode") == "suction");
    CHECK(j.at("plan").at("reduced_speed") == true);
    CHECK(j.at("plan").at("requires_seal_confirmation") == true);
    for (const auto& s : j.at("plan").at("steps")) CHECK(s.at("kind") != "close_fingers");
    CHECK(j.at("provenance").at("input_hashes").contains("rgb"));
  }

  TEST_CASE("plan: empty candidates exit 2 without a file") {
    const fs::path d = fresh_dir("empty");
    write_inputs(d, single(make_box(0.2, 0.15, Vec3(0.1, 0.08, 0.04))));
    AffordanceBundle b{Tensor3(3, 240, 320), Tensor3(3, 240, 320), Tensor3(12, 240, 320, 1.0f / 12)};
    for (int y = 0; y < 240; ++y)
      for (int x = 0; x < 320; ++x) {
        b.suction.at(2, y, x) = 1.0f;
        b.finger.at(2, y, x) = 1.0f;
      }
    io::write_affordance(d / "aff.tensor", b);
    const Result r = run(plan_args(d));
    CHECK(r.code == 2);
    CHECK_FALSE(fs::exists(d / "plan.json"));
  }

  TEST_CASE("input errors exit 1 with one line") {
    const fs::path d = fresh_dir("errors");
    write_inputs(d, single(make_box(0.2, 0.15, Vec3(0.1, 0.08, 0.04))));
    auto args = plan_args(d);
    args[2] = (d / "missing.tensor").string();
    Result r = run(args);
    CHECK(r.code == 1);
    CHECK(r.err.rfind("binpick: ", 0) == 0);
    CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);

    io::write_text(d / "bad.json", "{ not json");
    args = plan_args(d);
    args[6] = (d / "bad.json").string();
    r = run(args);
    CHECK(r.code == 1);
    CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);

    CHECK(run({"plan"}).code == 1);
    CHECK(run({"no-such-command"}).code == 1);
    CHECK(run({}).code == 1);
    CHECK(run({"simulate", "--config", (d / "bad.json").string(), "--report", (d / "r.json").string()}).code == 1);
  }

  TEST_CASE("gen-affordance: empty bin is background except the wall band") {
    const fs::path d = fresh_dir("empty_bin");
    write_inputs(d, Scene{});
    const AffordanceBundle b = io::read_affordance(d / "aff.tensor");
    const Scene scene;
    const CameraSetup cam = top_down_camera(scene.bin);
    const RenderBuffers geo = render_scene(scene, cam.cam_from_bin, cam.K);
    const double cup = GripperGeometry{}.cup_radius;
    int band = 0;
    for (int y = 0; y < b.height(); ++y)
      for (int x = 0; x < b.width(); ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * b.width() + x;
        const Vec3 p = geo.point_bin[i];
        const double wall = std::min({p.x(), 0.40 - p.x(), p.y(), 0.30 - p.y()});
        const bool in_band = geo.hit[i] == kHitFloor && wall >= 0.0 && wall < cup;
        band += in_band;
        CHECK(b.suction.at(in_band ? 1 : 2, y, x) == doctest::Approx(0.9f));
        CHECK(b.finger.at(2, y, x) == doctest::Approx(0.9f));
      }
    CHECK(band > 0);
    // container written then read then written is bit-identical
    const auto first = io::read_bytes(d / "aff.tensor");
    io::write_affordance(d / "aff2.tensor", b);
    CHECK(io::read_bytes(d / "aff2.tensor") == first);
  }

  TEST_CASE("material: transparent crop") {
    const fs::path d = fresh_dir("material");
    write_inputs(d, single(make_box(0.2, 0.15, Vec3(0.15, 0.12, 0.03), MaterialClass::kTransparent)));
    const Result r = run({"material", "--rgb", (d / "rgb.png").string(), "--depth", (d / "depth.tensor").string(),
                          "--pixel", "160,120", "--export", (d / "crops").string()});
    CHECK(r.code == 0);
    CHECK(r.out == "transparent\n");
    CHECK(fs::exists(d / "crops" / "crop_0160_0120.png"));
    const io::Json side = load(d / "crops" / "crop_0160_0120.json");
    CHECK(side.at("label") == "transparent");
    CHECK(side.at("source_pixel") == io::Json::array({160, 120}));
    CHECK(io::read_png_rgb(d / "crops" / "crop_0160_0120.png").width == 80);

    CHECK(run({"material", "--rgb", (d / "rgb.png").string(), "--depth", (d / "depth.tensor").string(), "--pixel",
               "5000,1"})
              .code == 1);
  }

  TEST_CASE("label-transfer over 15 synthetic views") {
    const fs::path d = fresh_dir("views");
    SceneSpec spec;
    spec.object_count = 6;
    Scene scene = generate_scene(4, spec, BinModel{});
    io::write_text(d / "scene.json", io::dump(io::to_json(scene)));
    REQUIRE(run({"synth-views", "--scene", (d / "scene.json").string(), "--out", (d / "cap").string(), "--views",
                 "16"})
                .code == 0);
    const Result r = run({"label-transfer", "--scene", (d / "cap").string()});
    REQUIRE(r.code == 0);
    const io::Json rep = load(d / "cap" / "report.json");
    REQUIRE(rep.at("views").size() == 16);
    for (int i = 1; i <= 15; ++i) {
      char name[16];
      std::snprintf(name, sizeof name, "view_%03d", i);
      const fs::path lp = d / "cap" / name / "labels.png";
      REQUIRE(fs::exists(lp));
      const LabelImage l = io::read_label_png(lp);
      std::array<std::size_t, 4> counts{};
      for (auto v : l.data) ++counts[v == 255 ? 3 : v];
      const auto& v = rep.at("views").at(static_cast<std::size_t>(i));
      CHECK(v.at("labeled").at("background") == counts[0]);
      CHECK(v.at("labeled").at("success") == counts[1]);
      CHECK(v.at("labeled").at("failure") == counts[2]);
      CHECK(v.at("projected").get<std::size_t>() >= v.at("written").get<std::size_t>());
    }
    // a second run gives the same bytes
    const auto before = io::read_bytes(d / "cap" / "view_007" / "labels.png");
    REQUIRE(run({"label-transfer", "--scene", (d / "cap").string()}).code == 0);
    CHECK(io::read_bytes(d / "cap" / "view_007" / "labels.png") == before);

    fs::remove(d / "cap" / "view_003" / "pose.json");
    const Result bad = run({"label-transfer", "--scene", (d / "cap").string()});
    CHECK(bad.code == 1);
    CHECK(bad.err.find("view_003") != std::string::npos);
  }

  TEST_CASE("label-transfer: duplicate identity view") {
    const fs::path d = fresh_dir("dup");
    Scene scene = generate_scene(9, SceneSpec{}, BinModel{});
    io::write_text(d / "scene.json", io::dump(io::to_json(scene)));
    REQUIRE(run({"synth-views", "--scene", (d / "scene.json").string(), "--out", (d / "cap").string(), "--views",
                 "1"})
                .code == 0);
    fs::copy(d / "cap" / "view_000", d / "cap" / "view_001");
    fs::remove(d / "cap" / "view_001" / "labels.png");
    REQUIRE(run({"label-transfer", "--scene", (d / "cap").string(), "--keep-unlabeled"}).code == 0);
    CHECK(io::read_label_png(d / "cap" / "view_001" / "labels.png") ==
          io::read_label_png(d / "cap" / "view_000" / "labels.png"));
  }

  TEST_CASE("simulate: deterministic report and normalized histogram") {
    const fs::path d = fresh_dir("simulate");
    io::write_text(d / "scenario.json", kScenario);
    const std::string cfg = (d / "scenario.json").string();
    REQUIRE(run({"simulate", "--config", cfg, "--episodes", "3", "--seed", "11", "--report", (d / "a.json").string(),
                 "--export-scenes", (d / "ply").string()})
                .code == 0);
    REQUIRE(run({"simulate", "--config", cfg, "--episodes", "3", "--seed", "11", "--jobs", "3", "--report",
                 (d / "b.json").string()})
                .code == 0);
    CHECK(io::read_bytes(d / "a.json") == io::read_bytes(d / "b.json"));
    const io::Json rep = load(d / "a.json");
    double sum = 0.0;
    for (const auto& [k, v] : rep.at("grasp_type_percent").items()) sum += v.get<double>();
    CHECK(std::abs(sum - 100.0) < 0.1);
    CHECK(rep.at("episodes").size() == 3);
    CHECK(fs::exists(d / "ply" / "episode_000.ply"));
    CHECK(io::read_text(d / "ply" / "episode_000.ply").rfind("ply\n", 0) == 0);
  }

  TEST_CASE("gen-scene is deterministic") {
    const fs::path d = fresh_dir("gen_scene");
    io::write_text(d / "scenario.json", kScenario);
    REQUIRE(run({"gen-scene", "--config", (d / "scenario.json").string(), "--seed", "3", "--out",
                 (d / "a.json").string()})
                .code == 0);
    REQUIRE(run({"gen-scene", "--config", (d / "scenario.json").string(), "--seed", "3", "--out",
                 (d / "b.json").string()})
                .code == 0);
    CHECK(io::read_bytes(d / "a.json") == io::read_bytes(d / "b.json"));
    CHECK(load(d / "a.json").at("objects").size() == 6);
  }

  TEST_CASE("version flag") {
    const Result r = run({"--version"});
    CHECK(r.code == 0);
    CHECK(r.out.find("binpick 1.0.0") != std::string::npos);
  }
}
