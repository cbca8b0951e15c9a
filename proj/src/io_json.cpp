#include <algorithm>
#include <set>

#include "binpick/errors.hpp"
#include "binpick/json_io.hpp"

namespace binpick::io {

namespace {

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const char* what) {
  if (!j.is_object()) throw FormatError(std::string(what) + " must be a JSON object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items())
    if (!ok.count(key)) throw FormatError(std::string("unknown key '") + key + "' in " + what);
}

template <typename T>
void read_opt(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

Json vec_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from(const Json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 3) throw FormatError("expected a 3-vector");
  return {v[0], v[1], v[2]};
}

template <typename F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed ") + what + ": " + e.what());
  }
}

}  // namespace

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(what + " is not valid JSON: " + e.what());
  }
}

// ---------------------------------------------------------------------------

Json to_json(const Pose& p, std::string_view convention) {
  const Eigen::Vector4d q = p.quaternion_wxyz();
  Json rot = Json::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) rot.push_back(p.rotation()(r, c));
  return {{"quaternion_wxyz", {q[0], q[1], q[2], q[3]}},
          {"rotation", rot},
          {"translation", vec_json(p.translation())},
          {"convention", convention}};
}

Pose pose_from_json(const Json& j) {
  return guarded("pose", [&] {
    check_keys(j, {"quaternion_wxyz", "rotation", "translation", "convention"}, "pose");
    const Vec3 t = j.contains("translation") ? vec_from(j.at("translation")) : Vec3::Zero();
    Pose p;
    if (j.contains("rotation")) {
      const auto r = j.at("rotation").get<std::vector<double>>();
      if (r.size() != 9) throw FormatError("pose rotation must have 9 entries");
      Mat3 R;
      for (int i = 0; i < 9; ++i) R(i / 3, i % 3) = r[static_cast<std::size_t>(i)];
      p = Pose(R, t);
    } else {
      const auto q = j.at("quaternion_wxyz").get<std::vector<double>>();
      if (q.size() != 4) throw FormatError("quaternion_wxyz must have 4 entries");
      p = Pose::from_quaternion(q[0], q[1], q[2], q[3], t);
    }
    const std::string conv = j.value("convention", std::string("world_to_camera"));
    if (conv == "camera_to_world") return p.inverse();
    static const std::set<std::string> kKnown{"world_to_camera", "bin_to_camera", "ee_to_camera", "ee_to_bin",
                                              "object_to_bin"};
    if (!kKnown.count(conv)) throw FormatError("unknown pose convention '" + conv + "'");
    return p;
  });
}

Json to_json(const CameraIntrinsics& K) {
  return {{"fx", K.fx}, {"fy", K.fy}, {"cx", K.cx}, {"cy", K.cy}, {"width", K.width}, {"height", K.height}};
}

CameraIntrinsics intrinsics_from_json(const Json& j) {
  return guarded("intrinsics", [&] {
    check_keys(j, {"fx", "fy", "cx", "cy", "width", "height"}, "intrinsics");
    CameraIntrinsics K{j.at("fx").get<double>(), j.at("fy").get<double>(), j.at("cx").get<double>(),
                       j.at("cy").get<double>(), j.at("width").get<int>(),  j.at("height").get<int>()};
    K.validate();
    return K;
  });
}

Json to_json(const BinModel& b) {
  return {{"pose", to_json(b.pose_cam_from_bin, "bin_to_camera")}, {"inner_length", b.inner_length}, {"inner_width", b.inner_width},
          {"wall_height", b.wall_height},        {"margin", b.margin},             {"wall_thickness", b.wall_thickness}};
}

BinModel bin_from_json(const Json& j) {
  return guarded("bin config", [&] {
    check_keys(j, {"pose", "inner_length", "inner_width", "wall_height", "margin", "wall_thickness"}, "bin config");
    BinModel b;
    if (j.contains("pose")) b.pose_cam_from_bin = pose_from_json(j.at("pose"));
    read_opt(j, "inner_length", b.inner_length);
    read_opt(j, "inner_width", b.inner_width);
    read_opt(j, "wall_height", b.wall_height);
    read_opt(j, "margin", b.margin);
    read_opt(j, "wall_thickness", b.wall_thickness);
    b.validate();
    return b;
  });
}

#define BINPICK_GRIPPER_FIELDS(X)                                                                                   \
  X(cup_radius) X(stroke) X(finger_thickness) X(finger_width) X(finger_reach) X(finger_grasp_depth) X(span_open)    \
      X(span_closed) X(body_half_x) X(body_back) X(body_flat) X(body_height)

Json to_json(const GripperGeometry& g) {
  Json j;
#define X(f) j[#f] = g.f;
  BINPICK_GRIPPER_FIELDS(X)
#undef X
  return j;
}

GripperGeometry gripper_from_json(const Json& j) {
  return guarded("gripper config", [&] {
#define X(f) #f,
    check_keys(j, {BINPICK_GRIPPER_FIELDS(X)}, "gripper config");
#undef X
    GripperGeometry g;
#define X(f) read_opt(j, #f, g.f);
    BINPICK_GRIPPER_FIELDS(X)
#undef X
    g.validate();
    return g;
  });
}

#define BINPICK_SCENE_FIELDS(X)                                                                                  \
  X(object_count) X(box_fraction) X(box_side_min) X(box_side_max) X(box_height_min) X(box_height_max)            \
      X(cylinder_radius_min) X(cylinder_radius_max) X(cylinder_length_min) X(cylinder_length_max) X(corner_bias) \
          X(metallic_fraction) X(transparent_fraction) X(density_min) X(density_max) X(metallic_density)         \
              X(wall_clearance) X(max_tries)

Json to_json(const SceneSpec& s) {
  Json j;
#define X(f) j[#f] = s.f;
  BINPICK_SCENE_FIELDS(X)
#undef X
  return j;
}

SceneSpec scene_spec_from_json(const Json& j) {
  return guarded("scene spec", [&] {
#define X(f) #f,
    check_keys(j, {BINPICK_SCENE_FIELDS(X)}, "scene spec");
#undef X
    SceneSpec s;
#define X(f) read_opt(j, #f, s.f);
    BINPICK_SCENE_FIELDS(X)
#undef X
    s.validate();
    return s;
  });
}

Json to_json(const Scene& scene) {
  Json objects = Json::array();
  for (const auto& o : scene.objects) {
    objects.push_back({{"id", o.id},
                       {"shape", o.shape == ShapeKind::kBox ? "box" : "cylinder"},
                       {"dims", vec_json(o.dims)},
                       {"pose", to_json(o.pose, "object_to_bin")},
                       {"mass", o.mass},
                       {"material", to_string(o.material)},
                       {"graspable_width", o.graspable_width}});
  }
  return {{"bin", to_json(scene.bin)}, {"rng_seed", scene.rng_seed}, {"objects", objects}};
}

Scene scene_from_json(const Json& j) {
  return guarded("scene", [&] {
    check_keys(j, {"bin", "rng_seed", "objects"}, "scene");
    Scene scene;
    if (j.contains("bin")) scene.bin = bin_from_json(j.at("bin"));
    read_opt(j, "rng_seed", scene.rng_seed);
    for (const auto& e : j.at("objects")) {
      check_keys(e, {"id", "shape", "dims", "pose", "mass", "material", "graspable_width"}, "scene object");
      SceneObject o;
      o.id = e.at("id").get<int>();
      const auto shape = e.at("shape").get<std::string>();
      if (shape != "box" && shape != "cylinder") throw FormatError("unknown shape '" + shape + "'");
      o.shape = shape == "box" ? ShapeKind::kBox : ShapeKind::kCylinder;
      o.dims = vec_from(e.at("dims"));
      o.pose = pose_from_json(e.at("pose"));
      o.mass = e.at("mass").get<double>();
      const auto m = material_from_string(e.at("material").get<std::string>());
      if (!m) throw FormatError("unknown material in scene object " + std::to_string(o.id));
      o.material = *m;
      if (e.contains("graspable_width")) {
        o.graspable_width = e.at("graspable_width").get<double>();
      } else {
        const Vec2 fh = o.footprint_half();
        o.graspable_width = 2.0 * fh[o.grip_axis()];
      }
      if (!(o.dims.x() > 0 && o.dims.y() > 0 && (o.shape == ShapeKind::kCylinder || o.dims.z() > 0) && o.mass > 0))
        throw FormatError("scene object " + std::to_string(o.id) + " needs positive dimensions and mass");
      scene.objects.push_back(o);
    }
    return scene;
  });
}

// ---------------------------------------------------------------------------
// Plans

Json to_json(const GripperConfig& c) {
  return {{"suction", c.suction == SuctionState::kOut ? "s_out" : "s_in"},
          {"aperture", c.aperture == Aperture::kOpen ? "f_open" : "f_close"},
          {"rotation", c.rotation == FingerRotation::kDefault ? "f_dft" : "f_rot"}};
}

GripperConfig config_from_json(const Json& j) {
  return guarded("gripper configuration", [&] {
    check_keys(j, {"suction", "aperture", "rotation"}, "gripper configuration");
    auto pick = [&](const char* key, const char* a, const char* b) {
      const auto v = j.at(key).get<std::string>();
      if (v != a && v != b) throw FormatError(std::string("bad ") + key + " value '" + v + "'");
      return v == a;
    };
    GripperConfig c;
    c.suction = pick("suction", "s_out", "s_in") ? SuctionState::kOut : SuctionState::kIn;
    c.aperture = pick("aperture", "f_open", "f_close") ? Aperture::kOpen : Aperture::kClose;
    c.rotation = pick("rotation", "f_dft", "f_rot") ? FingerRotation::kDefault : FingerRotation::kRotated;
    return c;
  });
}

namespace {

Json step_json(const PrimitiveStep& s) {
  Json j{{"kind", step_kind(s)}};
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, step::MoveTo>) j["pose"] = to_json(v.pose, "ee_to_camera");
        else if constexpr (std::is_same_v<T, step::SetConfig>) j["config"] = to_json(v.config);
        else if constexpr (std::is_same_v<T, step::Push>) {
          j["direction"] = vec_json(v.direction);
          j["distance"] = v.distance;
        } else if constexpr (std::is_same_v<T, step::Lift>) j["height"] = v.height;
      },
      s);
  return j;
}

PrimitiveStep step_from_json(const Json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "move_to") return step::MoveTo{pose_from_json(j.at("pose"))};
  if (kind == "set_config") return step::SetConfig{config_from_json(j.at("config"))};
  if (kind == "suction_on") return step::SuctionOn{};
  if (kind == "suction_off") return step::SuctionOff{};
  if (kind == "close_fingers") return step::CloseFingers{};
  if (kind == "open_fingers") return step::OpenFingers{};
  if (kind == "push") return step::Push{vec_from(j.at("direction")), j.at("distance").get<double>()};
  if (kind == "magnet_on") return step::MagnetOn{};
  if (kind == "magnet_off") return step::MagnetOff{};
  if (kind == "lift") return step::Lift{j.at("height").get<double>()};
  throw FormatError("unknown step kind '" + kind + "'");
}

}  // namespace

Json to_json(const GraspPlan& plan) {
  Json steps = Json::array();
  for (const auto& s : plan.steps) steps.push_back(step_json(s));
  return {{"mode", to_string(plan.mode)},
          {"steps", steps},
          {"expected_collision_free", plan.expected_collision_free},
          {"reduced_speed", plan.reduced_speed},
          {"requires_seal_confirmation", plan.requires_seal_confirmation}};
}

GraspPlan plan_from_json(const Json& j) {
  return guarded("plan", [&] {
    GraspPlan plan;
    const auto mode = plan_mode_from_string(j.at("mode").get<std::string>());
    if (!mode) throw FormatError("unknown plan mode");
    plan.mode = *mode;
    for (const auto& s : j.at("steps")) plan.steps.push_back(step_from_json(s));
    read_opt(j, "expected_collision_free", plan.expected_collision_free);
    read_opt(j, "reduced_speed", plan.reduced_speed);
    read_opt(j, "requires_seal_confirmation", plan.requires_seal_confirmation);
    return plan;
  });
}

Json to_json(const PlanDocument& doc) {
  const auto& s = doc.selection;
  return {{"version", doc.version},
          {"plan", to_json(doc.plan)},
          {"selection",
           {{"mode", s.mode == GraspMode::kSuction ? "suction" : "finger"},
            {"pixel", {s.pixel.x, s.pixel.y}},
            {"score", s.score},
            {"angle_deg", s.angle_deg}}},
          {"region", doc.region},
          {"provenance",
           {{"input_hashes", doc.provenance.input_hashes},
            {"eps_s", doc.provenance.eps_s},
            {"avoidance", doc.provenance.avoidance},
            {"greedy", doc.provenance.greedy}}}};
}

PlanDocument plan_document_from_json(const Json& j) {
  return guarded("plan document", [&] {
    PlanDocument doc;
    doc.version = j.at("version").get<std::string>();
    doc.plan = plan_from_json(j.at("plan"));
    const Json& s = j.at("selection");
    doc.selection.mode = s.at("mode").get<std::string>() == "finger" ? GraspMode::kFinger : GraspMode::kSuction;
    const auto px = s.at("pixel").get<std::vector<int>>();
    if (px.size() != 2) throw FormatError("selection pixel must have 2 entries");
    doc.selection.pixel = {px[0], px[1]};
    doc.selection.score = s.at("score").get<double>();
    doc.selection.angle_deg = s.at("angle_deg").get<double>();
    doc.region = j.at("region").get<std::string>();
    const Json& p = j.at("provenance");
    doc.provenance.input_hashes = p.at("input_hashes").get<std::map<std::string, std::string>>();
    doc.provenance.eps_s = p.at("eps_s").get<double>();
    doc.provenance.avoidance = p.at("avoidance").get<bool>();
    doc.provenance.greedy = p.at("greedy").get<bool>();
    return doc;
  });
}

// ---------------------------------------------------------------------------
// Scenario and reports

SimParams Scenario::sim_params() const {
  SimParams p = SimParams::defaults_for(bin);
  p.camera = top_down_camera(bin, camera_height, image_width, image_height, focal);
  p.gripper = gripper;
  p.planner.gripper = gripper;
  p.oracle.gripper = gripper;
  p.hold = hold;
  p.lift_accel = lift_accel;
  p.transparent_dropout = transparent_dropout;
  return p;
}

Scenario scenario_from_json(const Json& j) {
  return guarded("scenario config", [&] {
    check_keys(j, {"bin", "scene", "camera", "gripper", "hold", "policy", "limits", "lift_accel",
                   "transparent_dropout", "seed"},
               "scenario config");
    Scenario s;
    if (j.contains("bin")) s.bin = bin_from_json(j.at("bin"));
    if (j.contains("scene")) s.scene = scene_spec_from_json(j.at("scene"));
    if (j.contains("camera")) {
      const Json& c = j.at("camera");
      check_keys(c, {"height", "width_px", "height_px", "focal"}, "camera");
      read_opt(c, "height", s.camera_height);
      read_opt(c, "width_px", s.image_width);
      read_opt(c, "height_px", s.image_height);
      read_opt(c, "focal", s.focal);
      if (!(s.camera_height > s.bin.wall_height && s.image_width > 0 && s.image_height > 0 && s.focal > 0))
        throw DomainError("camera must sit above the walls with a positive image size and focal length");
    }
    if (j.contains("gripper")) s.gripper = gripper_from_json(j.at("gripper"));
    if (j.contains("hold")) {
      const Json& h = j.at("hold");
      check_keys(h, {"suction_force", "finger_span_closed", "finger_span_open", "magnet_force"}, "hold");
      read_opt(h, "suction_force", s.hold.suction_force);
      read_opt(h, "finger_span_closed", s.hold.finger_span_closed);
      read_opt(h, "finger_span_open", s.hold.finger_span_open);
      read_opt(h, "magnet_force", s.hold.magnet_force);
    }
    if (j.contains("policy")) {
      const Json& p = j.at("policy");
      check_keys(p, {"avoidance", "greedy", "eps_s", "fusion"}, "policy");
      read_opt(p, "avoidance", s.policy.avoidance);
      read_opt(p, "greedy", s.policy.greedy);
      read_opt(p, "eps_s", s.policy.eps_s);
      read_opt(p, "fusion", s.policy.fusion);
    }
    if (j.contains("limits")) {
      const Json& l = j.at("limits");
      check_keys(l, {"max_attempts", "max_consecutive_failures", "max_reselections", "exclusion_radius_px"}, "limits");
      read_opt(l, "max_attempts", s.limits.max_attempts);
      read_opt(l, "max_consecutive_failures", s.limits.max_consecutive_failures);
      read_opt(l, "max_reselections", s.limits.max_reselections);
      read_opt(l, "exclusion_radius_px", s.limits.exclusion_radius_px);
    }
    read_opt(j, "lift_accel", s.lift_accel);
    read_opt(j, "transparent_dropout", s.transparent_dropout);
    read_opt(j, "seed", s.seed);
    if (!(s.lift_accel >= 0 && s.transparent_dropout >= 0 && s.transparent_dropout <= 1))
      throw DomainError("lift_accel must be >= 0 and transparent_dropout in [0,1]");
    return s;
  });
}

Json to_json(const Scenario& s) {
  return {{"bin", to_json(s.bin)},
          {"scene", to_json(s.scene)},
          {"camera", {{"height", s.camera_height}, {"width_px", s.image_width}, {"height_px", s.image_height},
                      {"focal", s.focal}}},
          {"gripper", to_json(s.gripper)},
          {"hold", {{"suction_force", s.hold.suction_force}, {"finger_span_closed", s.hold.finger_span_closed},
                    {"finger_span_open", s.hold.finger_span_open}, {"magnet_force", s.hold.magnet_force}}},
          {"policy", {{"avoidance", s.policy.avoidance}, {"greedy", s.policy.greedy}, {"eps_s", s.policy.eps_s},
                      {"fusion", s.policy.fusion}}},
          {"limits", {{"max_attempts", s.limits.max_attempts},
                      {"max_consecutive_failures", s.limits.max_consecutive_failures},
                      {"max_reselections", s.limits.max_reselections},
                      {"exclusion_radius_px", s.limits.exclusion_radius_px}}},
          {"lift_accel", s.lift_accel},
          {"transparent_dropout", s.transparent_dropout},
          {"seed", s.seed}};
}

Json to_json(const EpisodeReport& r) {
  Json hist;
  for (std::size_t i = 0; i < kGraspTypes.size(); ++i) hist[std::string(to_string(kGraspTypes[i]))] = r.grasp_type_histogram[i];
  Json trace = Json::array();
  for (const auto& t : r.trace) {
    trace.push_back({{"attempt", t.attempt},
                     {"pixel", {t.pixel.x, t.pixel.y}},
                     {"type", to_string(t.type)},
                     {"object_id", t.object_id},
                     {"material", to_string(t.material)},
                     {"collision", t.collision},
                     {"success", t.success},
                     {"outcome", t.outcome}});
  }
  return {{"attempts", r.attempts},
          {"successes", r.successes},
          {"objects_cleared", r.objects_cleared},
          {"objects_total", r.objects_total},
          {"objects_penalized", r.objects_penalized},
          {"objects_remaining", r.objects_remaining},
          {"success_rate", r.success_rate},
          {"clear_rate", r.clear_rate},
          {"grasp_type_histogram", hist},
          {"collision_events", r.collision_events},
          {"trace", trace}};
}

AggregateReport aggregate(std::vector<EpisodeReport> episodes, std::vector<std::uint64_t> seeds) {
  AggregateReport a;
  a.episodes = std::move(episodes);
  a.seeds = std::move(seeds);
  int total = 0;
  for (const auto& e : a.episodes) {
    a.mean_success_rate += e.success_rate;
    a.mean_clear_rate += e.clear_rate;
    a.collision_events += e.collision_events;
    for (std::size_t i = 0; i < 5; ++i) a.histogram_total[i] += e.grasp_type_histogram[i];
    total += e.attempts;
  }
  if (!a.episodes.empty()) {
    a.mean_success_rate /= static_cast<double>(a.episodes.size());
    a.mean_clear_rate /= static_cast<double>(a.episodes.size());
  }
  if (total > 0)
    for (std::size_t i = 0; i < 5; ++i) a.histogram_percent[i] = 100.0 * a.histogram_total[i] / total;
  return a;
}

Json to_json(const AggregateReport& a, const Scenario& scenario, const PolicyFlags& flags) {
  Json episodes = Json::array();
  for (std::size_t k = 0; k < a.episodes.size(); ++k) {
    Json e = to_json(a.episodes[k]);
    e["seed"] = a.seeds.at(k);
    episodes.push_back(std::move(e));
  }
  Json pct;
  Json counts;
  for (std::size_t i = 0; i < kGraspTypes.size(); ++i) {
    pct[std::string(to_string(kGraspTypes[i]))] = a.histogram_percent[i];
    counts[std::string(to_string(kGraspTypes[i]))] = a.histogram_total[i];
  }
  return {{"version", kToolVersion},
          {"config", to_json(scenario)},
          {"policy", {{"avoidance", flags.avoidance}, {"greedy", flags.greedy}, {"eps_s", flags.eps_s},
                      {"fusion", flags.fusion}}},
          {"episode_count", a.episodes.size()},
          {"episodes", episodes},
          {"mean_success_rate", a.mean_success_rate},
          {"mean_clear_rate", a.mean_clear_rate},
          {"grasp_type_percent", pct},
          {"grasp_type_counts", counts},
          {"collision_events", a.collision_events}};
}

Json to_json(const TransferReport& r) {
  Json views = Json::array();
  for (std::size_t i = 0; i < r.views.size(); ++i) {
    const auto& v = r.views[i];
    views.push_back({{"view", i},
                     {"projected", v.projected},
                     {"occluded", v.occluded},
                     {"out_of_frame", v.out_of_frame},
                     {"written", v.written},
                     {"labeled", {{"background", v.labeled[0]}, {"success", v.labeled[1]}, {"failure", v.labeled[2]},
                                  {"unlabeled", v.labeled[3]}}}});
  }
  return {{"version", kToolVersion}, {"views", views}};
}

}  // namespace binpick::io
