#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <iostream>
#include <regex>
#include <thread>

#include "binpick/binplanner.hpp"
#include "binpick/cli.hpp"
#include "binpick/errors.hpp"
#include "binpick/io.hpp"
#include "binpick/json_io.hpp"
#include "binpick/labelxfer.hpp"
#include "binpick/material.hpp"
#include "binpick/rng.hpp"
#include "binpick/sim.hpp"

namespace fs = std::filesystem;

namespace binpick::cli {

namespace {

io::Json read_json(const std::string& path, const std::string& what) {
  return io::parse_json(io::read_text(path), what + " " + path);
}

Pixel parse_pixel(const std::string& s) {
  int x = 0;
  int y = 0;
  char tail = 0;
  if (std::sscanf(s.c_str(), "%d,%d%c", &x, &y, &tail) != 2) throw FormatError("pixel must be written as x,y");
  return {x, y};
}

Vec3 fallback_normal(const BinModel& bin) { return bin.pose_cam_from_bin.rotation() * Vec3::UnitZ(); }

Vec3 normal_or_up(const DepthImage& depth, const Pixel& u, const CameraIntrinsics& K, const BinModel& bin) {
  try {
    return estimate_normal(depth, u, K);
  } catch (const InsufficientSupportError&) {
    return fallback_normal(bin);
  }
}

// ---------------------------------------------------------------------------
// plan

struct PlanArgs {
  std::string depth, affordance, bin, camera, rgb, gripper, holder, dropoff, out;
  double eps_s = kDefaultSuctionThreshold;
  double min_prob = 0.5;
  int crop_px = 24;
  bool no_avoidance = false;
  bool greedy = false;
  bool fusion = false;
};

Pose bin_side_pose(const BinModel& bin, double x, const std::string& file) {
  if (!file.empty()) return io::pose_from_json(read_json(file, "pose"));
  return bin.pose_cam_from_bin * Pose(top_down_rotation(0.0), Vec3(x, bin.inner_width / 2.0, bin.wall_height + 0.05));
}

int cmd_plan(const PlanArgs& a) {
  const DepthImage depth = io::read_depth(a.depth);
  AffordanceBundle bundle = io::read_affordance(a.affordance);
  bundle.validate();
  const BinModel bin = io::bin_from_json(read_json(a.bin, "bin config"));
  const CameraIntrinsics K = io::intrinsics_from_json(read_json(a.camera, "camera intrinsics"));
  if (K.width != depth.width() || K.height != depth.height())
    throw ShapeMismatchError("camera intrinsics do not match the depth image size");
  PlannerParams pp;
  if (!a.gripper.empty()) pp.gripper = io::gripper_from_json(read_json(a.gripper, "gripper config"));

  const CandidateMask mask = build_candidate_mask(bundle, depth, a.min_prob);
  if (mask.empty()) {
    std::cerr << "binpick: no grasp candidates; no plan written\n";
    return kExitNoResult;
  }
  const auto policy = a.greedy ? SelectionPolicy::kGreedy : SelectionPolicy::kSuctionPriority;
  GraspSelection sel = select_grasp(bundle, mask, a.eps_s, policy);

  io::PlanDocument doc;
  doc.provenance.input_hashes = {{"depth", io::fnv1a_hex(io::read_bytes(a.depth))},
                                 {"affordance", io::fnv1a_hex(io::read_bytes(a.affordance))},
                                 {"bin", io::fnv1a_hex(io::read_bytes(a.bin))},
                                 {"camera", io::fnv1a_hex(io::read_bytes(a.camera))}};
  doc.provenance.eps_s = a.eps_s;
  doc.provenance.avoidance = !a.no_avoidance;
  doc.provenance.greedy = a.greedy;

  Strategy strategy = Strategy::kStandard;
  if (!a.rgb.empty()) {
    const RgbImage rgb = io::read_png_rgb(a.rgb);
    if (rgb.width != depth.width() || rgb.height != depth.height())
      throw ShapeMismatchError("RGB image does not match the depth image size");
    doc.provenance.input_hashes["rgb"] = io::fnv1a_hex(io::read_bytes(a.rgb));
    const MaterialClass m = heuristic_classifier(crop_at(rgb, sel.pixel, a.crop_px), depth_window(depth, sel.pixel, a.crop_px));
    strategy = dispatch_strategy(m, sel);
    sel = apply_strategy(strategy, sel, bundle);
  }

  const Vec3 p_cam = back_project(sel.pixel, depth.at(sel.pixel.x, sel.pixel.y), K);
  const bool avoid = !a.no_avoidance;
  GraspPlan plan;
  if (sel.mode == GraspMode::kSuction || strategy == Strategy::kMagnetic) {
    const Vec3 n_cam = normal_or_up(depth, sel.pixel, K, bin);
    const RefinedGrasp g = avoid ? avoid_suction(p_cam, n_cam, sel.angle_deg, bin, pp)
                                 : suction_grasp(p_cam, n_cam, sel.angle_deg, bin);
    doc.region = g.region.to_string();
    if (strategy == Strategy::kMagnetic) {
      plan = magnetic_sequence(bin_side_pose(bin, -0.10, a.holder), g.pose,
                               bin_side_pose(bin, bin.inner_length + 0.10, a.dropoff), pp.lift_height,
                               approach_config(g));
      plan.expected_collision_free = !grasp_hits_walls(g, bin, pp.gripper);
    } else if (a.fusion && g.mode == PlanMode::kSuction && strategy == Strategy::kStandard) {
      plan = fusion_sequence(g.pose, pp.lift_height);
      plan.expected_collision_free = !grasp_hits_walls(g, bin, pp.gripper);
    } else {
      plan = make_plan(g, bin, pp);
    }
  } else if (avoid) {
    const FingerRefinement r = refine_finger(p_cam, sel.angle_deg, bin, pp);
    std::visit(
        [&](const auto& v) {
          plan = make_plan(v, bin, pp);
          if constexpr (std::is_same_v<std::decay_t<decltype(v)>, PushRequest>) doc.region = v.push.region.to_string();
          else doc.region = v.region.to_string();
        },
        r);
  } else {
    const RefinedGrasp g = finger_grasp(p_cam, sel.angle_deg, bin);
    doc.region = g.region.to_string();
    plan = make_plan(g, bin, pp);
  }
  if (strategy == Strategy::kGentleSuction) {
    plan.reduced_speed = true;
    plan.requires_seal_confirmation = true;
  }
  if (!validate_plan(plan)) throw DomainError("internal error: generated plan violates the gripper state machine");

  doc.plan = std::move(plan);
  doc.selection = sel;
  io::write_text(a.out, io::dump(io::to_json(doc)));
  std::cout << to_string(doc.plan.mode) << " at (" << sel.pixel.x << "," << sel.pixel.y << ") region "
            << doc.region << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// label-transfer

struct TransferArgs {
  std::string scene;
  double occlusion_tol_mm = 5.0;
  bool keep_unlabeled = false;
};

std::vector<fs::path> view_dirs(const fs::path& dir) {
  static const std::regex kView("view_[0-9]{3}");
  std::vector<fs::path> out;
  if (!fs::is_directory(dir)) throw FormatError("scene directory " + dir.string() + " does not exist");
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_directory() && std::regex_match(e.path().filename().string(), kView)) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  if (out.empty()) throw FormatError("no view_### directories in " + dir.string());
  if (out.front().filename() != "view_000") throw FormatError("scene is missing view_000");
  return out;
}

fs::path depth_file(const fs::path& view) {
  const fs::path tensor = view / "depth.tensor";
  return fs::exists(tensor) ? tensor : view / "depth";
}

int cmd_label_transfer(const TransferArgs& a) {
  if (!(a.occlusion_tol_mm >= 0.0)) throw DomainError("occlusion tolerance must be >= 0");
  const fs::path dir = a.scene;
  const auto views = view_dirs(dir);
  SceneCapture scene;
  scene.intrinsics = io::intrinsics_from_json(read_json((dir / "intrinsics.json").string(), "intrinsics"));
  for (std::size_t i = 0; i < views.size(); ++i) {
    const fs::path& v = views[i];
    try {
      LabeledView view;
      view.depth = io::read_depth(depth_file(v));
      view.cam_pose = io::pose_from_json(io::parse_json(io::read_text(v / "pose.json"), "pose.json"));
      view.rgb = fs::exists(v / "rgb.png") ? io::read_png_rgb(v / "rgb.png")
                                           : RgbImage(view.depth.width(), view.depth.height());
      view.labels = i == 0 ? io::read_label_png(v / "labels.png")
                           : LabelImage(view.depth.width(), view.depth.height(), 0);
      if (view.depth.width() != scene.intrinsics.width || view.depth.height() != scene.intrinsics.height ||
          view.rgb.width != view.depth.width() || view.rgb.height != view.depth.height() ||
          view.labels.width != view.depth.width() || view.labels.height != view.depth.height())
        throw ShapeMismatchError("image sizes disagree with the intrinsics");
      if (i == 0 && !std::all_of(view.labels.data.begin(), view.labels.data.end(), is_known_label))
        throw DomainError("labels outside {0,1,2,255}");
      scene.views.push_back(std::move(view));
    } catch (const Error& e) {
      throw FormatError("malformed view " + v.filename().string() + ": " + e.what());
    }
  }
  TransferOptions opts;
  opts.occlusion_tol = a.occlusion_tol_mm / 1000.0;
  opts.keep_unlabeled = a.keep_unlabeled;
  TransferReport report;
  const SceneCapture out = transfer_labels(scene, opts, &report);
  for (std::size_t i = 1; i < views.size(); ++i) io::write_label_png(views[i] / "labels.png", out.views[i].labels);
  io::write_text(dir / "report.json", io::dump(io::to_json(report)));
  std::cout << "labeled " << views.size() - 1 << " views\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string config, report, export_dir;
  int episodes = 10;
  std::optional<std::uint64_t> seed;
  bool no_avoidance = false;
  bool greedy = false;
  bool fusion = false;
  int jobs = 1;
};

int cmd_simulate(const SimulateArgs& a) {
  const io::Scenario sc = io::scenario_from_json(read_json(a.config, "scenario config"));
  if (a.episodes < 1) throw DomainError("--episodes must be >= 1");
  if (a.jobs < 1) throw DomainError("--jobs must be >= 1");
  PolicyFlags flags = sc.policy;
  if (a.no_avoidance) flags.avoidance = false;
  if (a.greedy) flags.greedy = true;
  if (a.fusion) flags.fusion = true;
  const std::uint64_t seed = a.seed.value_or(sc.seed);
  const SimParams params = sc.sim_params();

  const auto n = static_cast<std::size_t>(a.episodes);
  std::vector<std::uint64_t> seeds(n);
  for (std::size_t k = 0; k < n; ++k) seeds[k] = mix_seed(seed, k);
  std::vector<EpisodeReport> reports(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < n; k = next++) {
      try {
        reports[k] = run_episode(generate_scene(seeds[k], sc.scene, sc.bin), flags, sc.limits, params);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int threads = std::min<int>(a.jobs, a.episodes);
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  if (!a.export_dir.empty()) {
    fs::create_directories(a.export_dir);
    for (std::size_t k = 0; k < n; ++k) {
      char name[32];
      std::snprintf(name, sizeof name, "episode_%03zu.ply", k);
      io::write_text(fs::path(a.export_dir) / name,
                     io::scene_ply(reports[k].final_scene, reports[k].last_gripper_pose, configs::kSuctionApproach,
                                   params.gripper));
    }
  }
  const io::AggregateReport agg = io::aggregate(std::move(reports), seeds);
  io::write_text(a.report, io::dump(io::to_json(agg, sc, flags)));
  char line[160];
  std::snprintf(line, sizeof line, "episodes %d  mean success %.3f  mean clear %.3f  collisions %d\n", a.episodes,
                agg.mean_success_rate, agg.mean_clear_rate, agg.collision_events);
  std::cout << line;
  return kExitOk;
}

// ---------------------------------------------------------------------------
// gen-scene, gen-affordance, synth-views, material

struct CameraFile {
  Pose pose;
  CameraIntrinsics K;
};

CameraFile read_camera(const std::string& path) {
  const io::Json j = read_json(path, "camera");
  if (!j.is_object() || !j.contains("pose") || !j.contains("intrinsics"))
    throw FormatError("camera file needs 'pose' and 'intrinsics'");
  return {io::pose_from_json(j.at("pose")), io::intrinsics_from_json(j.at("intrinsics"))};
}

struct GenSceneArgs {
  std::string config, out, camera_out;
  std::optional<std::uint64_t> seed;
};

int cmd_gen_scene(const GenSceneArgs& a) {
  const io::Scenario sc = io::scenario_from_json(read_json(a.config, "scenario config"));
  const Scene scene = generate_scene(a.seed.value_or(sc.seed), sc.scene, sc.bin);
  io::write_text(a.out, io::dump(io::to_json(scene)));
  if (!a.camera_out.empty()) {
    const SimParams p = sc.sim_params();
    io::write_text(a.camera_out,
                   io::dump({{"pose", io::to_json(p.camera.cam_from_bin)}, {"intrinsics", io::to_json(p.camera.K)}}));
  }
  return kExitOk;
}

struct GenAffordanceArgs {
  std::string scene, camera, out, depth_out, rgb_out;
  std::uint64_t seed = 0;
  double dropout = 0.7;
};

int cmd_gen_affordance(const GenAffordanceArgs& a) {
  const Scene scene = io::scene_from_json(read_json(a.scene, "scene"));
  const CameraFile cam = read_camera(a.camera);
  if (!(a.dropout >= 0.0 && a.dropout <= 1.0)) throw DomainError("--dropout must lie in [0,1]");
  const RenderBuffers buffers = render_scene(scene, cam.pose, cam.K, RenderOptions{a.dropout, a.seed});
  OracleParams op;
  const AffordanceBundle bundle = oracle_affordance(scene, buffers, buffers.depth, cam.K, op);
  io::write_affordance(a.out, bundle);
  if (!a.depth_out.empty()) io::write_depth(a.depth_out, buffers.depth);
  if (!a.rgb_out.empty()) io::write_png(a.rgb_out, buffers.rgb);
  return kExitOk;
}

/// World-to-camera pose of a camera at `eye` looking at `target`, image y toward `down`.
Pose look_at(const Vec3& eye, const Vec3& target, const Vec3& down) {
  const Vec3 z = (target - eye).normalized();
  const Vec3 x = down.cross(z).normalized();
  const Vec3 y = z.cross(x);
  Mat3 R;
  R.row(0) = x.transpose();
  R.row(1) = y.transpose();
  R.row(2) = z.transpose();
  return Pose(R, -(R * eye));
}

struct SynthViewsArgs {
  std::string scene, out;
  int views = 15;
  double tilt_deg = 20.0;
  double height = 0.9;
  std::uint64_t seed = 0;
};

int cmd_synth_views(const SynthViewsArgs& a) {
  const Scene scene = io::scene_from_json(read_json(a.scene, "scene"));
  if (a.views < 1) throw DomainError("--views must be >= 1");
  const CameraSetup top = top_down_camera(scene.bin, a.height);
  const Vec3 target = scene.bin.center();
  fs::create_directories(a.out);
  io::write_text(fs::path(a.out) / "intrinsics.json", io::dump(io::to_json(top.K)));
  for (int i = 0; i < a.views; ++i) {
    Pose pose = top.cam_from_bin;
    if (i > 0) {
      const double az = deg2rad(360.0 * (i - 1) / std::max(1, a.views - 1));
      const double r = a.height * std::tan(deg2rad(a.tilt_deg));
      const Vec3 eye = target + Vec3(r * std::cos(az), r * std::sin(az), a.height);
      pose = look_at(eye, target, Vec3(0.0, -1.0, 0.0));
    }
    const RenderBuffers b = render_scene(scene, pose, top.K, RenderOptions{0.0, mix_seed(a.seed, i)});
    char name[16];
    std::snprintf(name, sizeof name, "view_%03d", i);
    const fs::path v = fs::path(a.out) / name;
    fs::create_directories(v);
    io::write_png(v / "rgb.png", b.rgb);
    io::write_depth(v / "depth.tensor", b.depth);
    io::write_text(v / "pose.json", io::dump(io::to_json(pose)));
    if (i == 0) {
      const AffordanceBundle bundle = oracle_affordance(scene, b, b.depth, top.K);
      LabelImage labels(top.K.width, top.K.height, 255);
      for (int y = 0; y < top.K.height; ++y) {
        for (int x = 0; x < top.K.width; ++x) {
          if (!b.depth.valid(x, y)) continue;
          const float s = bundle.suction.at(0, y, x);
          const float f = bundle.suction.at(1, y, x);
          const float g = bundle.suction.at(2, y, x);
          labels.at(x, y) = g >= s && g >= f ? 0 : (s > f ? 1 : 2);
        }
      }
      io::write_label_png(v / "labels.png", labels);
    }
  }
  return kExitOk;
}

struct MaterialArgs {
  std::string rgb, depth, pixel, export_dir, label;
  int crop_px = 24;
};

int cmd_material(const MaterialArgs& a) {
  const RgbImage rgb = io::read_png_rgb(a.rgb);
  const DepthImage depth = io::read_depth(a.depth);
  if (rgb.width != depth.width() || rgb.height != depth.height())
    throw ShapeMismatchError("RGB and depth sizes differ");
  if (a.crop_px < 1) throw DomainError("--crop-px must be >= 1");
  const Pixel u = parse_pixel(a.pixel);
  const GraspCrop crop = crop_at(rgb, u, a.crop_px);
  const MaterialClass m = heuristic_classifier(crop, depth_window(depth, u, a.crop_px));
  if (!a.export_dir.empty()) {
    fs::create_directories(a.export_dir);
    char stem[48];
    std::snprintf(stem, sizeof stem, "crop_%04d_%04d", u.x, u.y);
    const fs::path base = fs::path(a.export_dir) / stem;
    io::write_png(fs::path(base).concat(".png"), crop.rgb);
    const std::string label = a.label.empty() ? std::string(to_string(m)) : a.label;
    if (!material_from_string(label)) throw DomainError("--label must be metallic, transparent or other");
    io::write_text(fs::path(base).concat(".json"),
                   io::dump({{"source_pixel", {u.x, u.y}}, {"label", label}, {"version", io::kToolVersion}}));
  }
  std::cout << to_string(m) << "\n";
  return kExitOk;
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Grasp planning and simulation for cluttered bin picking", "binpick"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(io::kToolVersion));
  std::function<int()> action;

  PlanArgs plan;
  auto* p = app.add_subcommand("plan", "Select and refine a grasp, write the primitive plan");
  p->add_option("--depth", plan.depth, "Depth tensor container")->required();
  p->add_option("--affordance", plan.affordance, "Affordance tensor container")->required();
  p->add_option("--bin", plan.bin, "Bin config JSON")->required();
  p->add_option("--camera", plan.camera, "Camera intrinsics JSON")->required();
  p->add_option("--rgb", plan.rgb, "RGB PNG; enables material dispatch");
  p->add_option("--gripper", plan.gripper, "Gripper geometry JSON");
  p->add_option("--holder", plan.holder, "Magnet holder pose JSON (camera frame)");
  p->add_option("--dropoff", plan.dropoff, "Drop-off pose JSON (camera frame)");
  p->add_option("--eps-s", plan.eps_s, "Suction priority threshold");
  p->add_option("--min-prob", plan.min_prob, "Candidate mask threshold");
  p->add_option("--crop-px", plan.crop_px, "Material crop window");
  p->add_flag("--no-avoidance", plan.no_avoidance, "Skip collision-aware refinement");
  p->add_flag("--greedy", plan.greedy, "Plain argmax over both modes");
  p->add_flag("--fusion", plan.fusion, "Fuse suction picks with a finger close");
  p->add_option("--out", plan.out, "Plan JSON to write")->required();
  p->callback([&] { action = [&] { return cmd_plan(plan); }; });

  TransferArgs xfer;
  auto* t = app.add_subcommand("label-transfer", "Propagate view_000 labels to the other views");
  t->add_option("--scene", xfer.scene, "Scene directory")->required();
  t->add_option("--occlusion-tol", xfer.occlusion_tol_mm, "Depth agreement tolerance (mm)");
  t->add_flag("--keep-unlabeled", xfer.keep_unlabeled, "Leave untouched pixels unlabeled (255)");
  t->callback([&] { action = [&] { return cmd_label_transfer(xfer); }; });

  SimulateArgs sim;
  std::uint64_t sim_seed = 0;
  auto* s = app.add_subcommand("simulate", "Run seeded bin-clearing episodes");
  s->add_option("--config", sim.config, "Scenario JSON")->required();
  s->add_option("--episodes", sim.episodes, "Episode count");
  auto* seed_opt = s->add_option("--seed", sim_seed, "Base seed (overrides the config)");
  s->add_flag("--no-avoidance", sim.no_avoidance, "Disable collision-aware refinement");
  s->add_flag("--greedy", sim.greedy, "Greedy selection");
  s->add_flag("--fusion", sim.fusion, "Fusion hold model for suction picks");
  s->add_option("--jobs", sim.jobs, "Parallel episodes");
  s->add_option("--report", sim.report, "Report JSON to write")->required();
  s->add_option("--export-scenes", sim.export_dir, "Directory for PLY exports");
  s->callback([&] {
    if (*seed_opt) sim.seed = sim_seed;
    action = [&] { return cmd_simulate(sim); };
  });

  GenSceneArgs gs;
  std::uint64_t gs_seed = 0;
  auto* g = app.add_subcommand("gen-scene", "Generate a scene JSON from a scenario");
  g->add_option("--config", gs.config, "Scenario JSON")->required();
  auto* gs_seed_opt = g->add_option("--seed", gs_seed, "Scene seed");
  g->add_option("--out", gs.out, "Scene JSON to write")->required();
  g->add_option("--camera-out", gs.camera_out, "Also write the scenario camera");
  g->callback([&] {
    if (*gs_seed_opt) gs.seed = gs_seed;
    action = [&] { return cmd_gen_scene(gs); };
  });

  GenAffordanceArgs ga;
  auto* ga_cmd = app.add_subcommand("gen-affordance", "Render a scene and write oracle affordances");
  ga_cmd->add_option("--scene", ga.scene, "Scene JSON")->required();
  ga_cmd->add_option("--camera", ga.camera, "Camera JSON {pose, intrinsics}")->required();
  ga_cmd->add_option("--out", ga.out, "Affordance container to write")->required();
  ga_cmd->add_option("--depth-out", ga.depth_out, "Also write the rendered depth");
  ga_cmd->add_option("--rgb-out", ga.rgb_out, "Also write the rendered RGB");
  ga_cmd->add_option("--seed", ga.seed, "Depth noise seed");
  ga_cmd->add_option("--dropout", ga.dropout, "Transparent depth dropout probability");
  ga_cmd->callback([&] { action = [&] { return cmd_gen_affordance(ga); }; });

  SynthViewsArgs sv;
  auto* v = app.add_subcommand("synth-views", "Render a multi-view label-transfer scene directory");
  v->add_option("--scene", sv.scene, "Scene JSON")->required();
  v->add_option("--out", sv.out, "Output directory")->required();
  v->add_option("--views", sv.views, "View count including view_000");
  v->add_option("--tilt", sv.tilt_deg, "Tilt of the ring views (deg)");
  v->add_option("--seed", sv.seed, "Noise seed");
  v->callback([&] { action = [&] { return cmd_synth_views(sv); }; });

  MaterialArgs mat;
  auto* m = app.add_subcommand("material", "Classify the surface material around a pixel");
  m->add_option("--rgb", mat.rgb, "RGB PNG")->required();
  m->add_option("--depth", mat.depth, "Depth tensor container")->required();
  m->add_option("--pixel", mat.pixel, "Pixel as x,y")->required();
  m->add_option("--crop-px", mat.crop_px, "Crop window (px)");
  m->add_option("--export", mat.export_dir, "Write the 80x80 crop and sidecar JSON here");
  m->add_option("--label", mat.label, "Label for the exported sidecar");
  m->callback([&] { action = [&] { return cmd_material(mat); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {  // --help, --version
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "binpick: " << one_line(e.what()) << "\n";
    return kExitInputError;
  }
  try {
    return action ? action() : kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "binpick: " << one_line(e.what()) << "\n";
    return kExitInputError;
  }
}

}  // namespace binpick::cli
