#include <algorithm>
#include <cmath>
#include <optional>

#include "binpick/rng.hpp"
#include "binpick/sim.hpp"

namespace binpick {

namespace {

struct Candidate {
  GraspSelection selection;
  std::size_t object = 0;
  MaterialClass material = MaterialClass::kOther;
  Strategy strategy = Strategy::kStandard;
  GraspType type = GraspType::kSuction;
  RefinedGrasp grasp;
  std::optional<PushRequest> push;
  bool collides = false;
};

bool truth_success(const Tensor3& t, const Pixel& u) {
  const float s = t.at(0, u.y, u.x);
  return s > t.at(1, u.y, u.x) && s > t.at(2, u.y, u.x);
}

Vec3 surface_normal(const DepthImage& depth, const Pixel& u, const CameraIntrinsics& K, const BinModel& bin) {
  try {
    return estimate_normal(depth, u, K);
  } catch (const Error&) {
    return bin.pose_cam_from_bin.rotation() * Vec3::UnitZ();
  }
}

bool footprint_inside(const SceneObject& o, const BinModel& bin) {
  const Vec2 h = o.footprint_half();
  const Mat3& R = o.pose.rotation();
  const Vec3& c = o.pose.translation();
  for (double sx : {-1.0, 1.0}) {
    for (double sy : {-1.0, 1.0}) {
      const Vec3 p = c + R * Vec3(sx * h.x(), sy * h.y(), 0.0);
      if (p.x() < 0.0 || p.y() < 0.0 || p.x() > bin.inner_length || p.y() > bin.inner_width) return false;
    }
  }
  return true;
}

bool overlaps_others(const Scene& scene, std::size_t index) {
  for (std::size_t j = 0; j < scene.objects.size(); ++j)
    if (j != index && footprint_penetration(scene.objects[index], scene.objects[j]) > 0.0) return true;
  return false;
}

/// Teleports the object along `dir`, backing off until it is free. Returns the distance moved.
double execute_push(Scene& scene, std::size_t index, const Vec3& dir, double distance, double step) {
  const SceneObject original = scene.objects[index];
  double moved = distance;
  while (moved > 0.0) {
    scene.objects[index].pose = Pose(original.pose.rotation(), original.pose.translation() + moved * dir);
    if (footprint_inside(scene.objects[index], scene.bin) && !overlaps_others(scene, index)) return moved;
    moved -= step;
  }
  scene.objects[index] = original;
  return 0.0;
}

void exclude(CandidateMask& mask, GraspMode mode, const Pixel& u, int radius) {
  for (int y = std::max(0, u.y - radius); y <= std::min(mask.height - 1, u.y + radius); ++y)
    for (int x = std::max(0, u.x - radius); x <= std::min(mask.width - 1, u.x + radius); ++x) mask.set(mode, x, y, false);
}

class Episode {
 public:
  Episode(const Scene& scene, const PolicyFlags& flags, const EpisodeLimits& limits, const SimParams& params)
      : scene_(scene), flags_(flags), limits_(limits), params_(params), classifier_(params.material) {
    bin_ = scene_.bin;
    bin_.pose_cam_from_bin = params_.camera.cam_from_bin;
    scene_.bin = bin_;
  }

  EpisodeReport run() {
    report_.objects_total = static_cast<int>(scene_.objects.size());
    for (int attempt = 0; attempt < limits_.max_attempts && !scene_.objects.empty(); ++attempt) {
      if (!attempt_once(attempt)) break;
    }
    report_.objects_remaining = static_cast<int>(scene_.objects.size());
    report_.success_rate = report_.attempts > 0 ? static_cast<double>(report_.successes) / report_.attempts : 0.0;
    report_.clear_rate =
        report_.objects_total > 0 ? static_cast<double>(report_.objects_cleared) / report_.objects_total : 0.0;
    report_.final_scene = scene_;
    return report_;
  }

 private:
  const CameraIntrinsics& K() const { return params_.camera.K; }

  Candidate plan(const GraspSelection& raw) {
    Candidate c;
    const Pixel u = raw.pixel;
    c.object = static_cast<std::size_t>(buffers_.hit[static_cast<std::size_t>(u.y) * K().width + u.x]);
    const GraspCrop crop = crop_at(buffers_.rgb, u, params_.crop_px);
    c.material = classifier_.classify(crop, depth_window(buffers_.depth, u, params_.crop_px));
    c.strategy = dispatch_strategy(c.material, raw);
    c.selection = apply_strategy(c.strategy, raw, bundle_);
    const GraspSelection& sel = c.selection;

    const Vec3 p_cam = back_project(u, buffers_.depth.at(u.x, u.y), K());
    const GripperGeometry& geom = params_.planner.gripper;
    // The magnet holder is carried on the cup, so magnetic picks plan like suction.
    if (sel.mode == GraspMode::kSuction || c.strategy == Strategy::kMagnetic) {
      const Vec3 n_cam = surface_normal(buffers_.depth, u, K(), bin_);
      if (flags_.avoidance) {
        c.grasp = avoid_suction(p_cam, n_cam, sel.angle_deg, bin_, params_.planner);
      } else {
        c.grasp = suction_grasp(p_cam, n_cam, sel.angle_deg, bin_);
      }
      c.collides = grasp_hits_walls(c.grasp, bin_, geom);
      c.type = c.strategy == Strategy::kMagnetic          ? GraspType::kMagnetic
               : c.grasp.mode == PlanMode::kSuctionCa     ? GraspType::kSuctionCa
                                                          : GraspType::kSuction;
      return c;
    }

    if (flags_.avoidance) {
      FingerRefinement r = refine_finger(p_cam, sel.angle_deg, bin_, params_.planner);
      if (auto* req = std::get_if<PushRequest>(&r)) {
        c.push = *req;
        c.grasp = req->regrasp;
        c.type = GraspType::kPush;
        c.collides = grasp_hits_walls(req->push, bin_, geom) || grasp_hits_walls(req->regrasp, bin_, geom);
        return c;
      }
      c.grasp = std::get<RefinedGrasp>(r);
    } else {
      c.grasp = finger_grasp(p_cam, sel.angle_deg, bin_);
    }
    c.type = c.strategy == Strategy::kMagnetic ? GraspType::kMagnetic : GraspType::kFinger;
    c.collides = grasp_hits_walls(c.grasp, bin_, geom);
    return c;
  }

  std::optional<Candidate> choose() {
    CandidateMask mask = build_candidate_mask(bundle_, buffers_.depth, params_.min_prob);
    const auto policy = flags_.greedy ? SelectionPolicy::kGreedy : SelectionPolicy::kSuctionPriority;
    for (int r = 0; r <= limits_.max_reselections && !mask.empty(); ++r) {
      const GraspSelection sel = select_grasp(bundle_, mask, flags_.eps_s, policy);
      Candidate c = plan(sel);
      if (!flags_.avoidance || !c.collides) return c;
      exclude(mask, sel.mode, sel.pixel, limits_.exclusion_radius_px);
    }
    return std::nullopt;
  }

  double lift_accel(const Candidate& c) const {
    return c.strategy == Strategy::kGentleSuction ? params_.lift_accel / 2.0 : params_.lift_accel;
  }

  bool execute(const Candidate& c, AttemptTrace& t) {
    if (c.collides) {
      ++report_.collision_events;
      t.collision = true;
      t.outcome = "collision";
      return false;
    }
    const SceneObject& obj = scene_.objects[c.object];
    const Pixel u = c.selection.pixel;
    const HoldModel& hold = params_.hold;
    const double a = lift_accel(c);

    switch (c.type) {
      case GraspType::kSuction:
      case GraspType::kSuctionCa: {
        if (!truth_success(bundle_.suction, u)) return fail(t, "no_seal");
        const bool holds = flags_.fusion && c.strategy == Strategy::kStandard
                               ? hold.fusion_holds(obj.mass, a, obj.graspable_width)
                               : hold.suction_holds(obj.mass, a);
        return holds ? ok(t) : fail(t, "dropped");
      }
      case GraspType::kFinger:
        if (!truth_success(bundle_.finger, u)) return fail(t, "slipped");
        return fusion_hold_check(obj.graspable_width, hold.finger_span_closed, hold.finger_span_open)
                   ? ok(t)
                   : fail(t, "dropped");
      case GraspType::kMagnetic: {
        const Tensor3& truth = c.selection.mode == GraspMode::kSuction ? bundle_.suction : bundle_.finger;
        if (!truth_success(truth, u)) return fail(t, "no_contact");
        if (obj.material != MaterialClass::kMetallic) return fail(t, "not_magnetic");
        return obj.mass * (a + kGravity) <= hold.magnet_force ? ok(t) : fail(t, "dropped");
      }
      case GraspType::kPush: {
        const Vec3 p_bin = c.push->push.pose_in_bin.translation();
        const double moved =
            execute_push(scene_, c.object, c.push->direction_bin, c.push->distance, params_.push_step);
        const Vec3 q = p_bin + moved * c.push->direction_bin;
        const RefinedGrasp regrasp = finger_grasp(bin_.pose_cam_from_bin * q, c.selection.angle_deg, bin_);
        last_pose_ = regrasp.pose_in_bin;
        if (grasp_hits_walls(regrasp, bin_, params_.planner.gripper)) return fail(t, "regrasp_blocked");
        if (!finger_success_probability(scene_, c.object, q, params_.gripper)) return fail(t, "slipped");
        return ok(t);
      }
    }
    return fail(t, "unknown");
  }

  static bool ok(AttemptTrace& t) {
    t.success = true;
    t.outcome = "success";
    return true;
  }
  static bool fail(AttemptTrace& t, const char* why) {
    t.outcome = why;
    return false;
  }

  bool attempt_once(int attempt) {
    const RenderOptions ro{params_.transparent_dropout, mix_seed(scene_.rng_seed, static_cast<std::uint64_t>(attempt))};
    buffers_ = render_scene(scene_, params_.camera.cam_from_bin, K(), ro);
    bundle_ = oracle_affordance(scene_, buffers_, buffers_.depth, K(), params_.oracle);

    const std::optional<Candidate> chosen = choose();
    if (!chosen) return false;
    const Candidate& c = *chosen;

    AttemptTrace t;
    t.attempt = attempt;
    t.pixel = c.selection.pixel;
    t.type = c.type;
    t.object_id = scene_.objects[c.object].id;
    t.material = c.material;
    last_pose_ = c.grasp.pose_in_bin;

    const bool success = execute(c, t);
    report_.last_gripper_pose = last_pose_;
    ++report_.attempts;
    ++report_.grasp_type_histogram[static_cast<std::size_t>(c.type)];

    const int id = t.object_id;
    if (success) {
      ++report_.successes;
      ++report_.objects_cleared;
      remove(id);
      streak_object_ = -1;
      streak_ = 0;
    } else {
      streak_ = streak_object_ == id ? streak_ + 1 : 1;
      streak_object_ = id;
      if (streak_ >= limits_.max_consecutive_failures) {
        ++report_.objects_penalized;
        remove(id);
        t.outcome += "+removed";
        streak_object_ = -1;
        streak_ = 0;
      }
    }
    report_.trace.push_back(std::move(t));
    return true;
  }

  void remove(int id) {
    std::erase_if(scene_.objects, [id](const SceneObject& o) { return o.id == id; });
  }

  Scene scene_;
  BinModel bin_;
  PolicyFlags flags_;
  EpisodeLimits limits_;
  SimParams params_;
  HeuristicClassifier classifier_;
  RenderBuffers buffers_;
  AffordanceBundle bundle_;
  EpisodeReport report_;
  Pose last_pose_;
  int streak_object_ = -1;
  int streak_ = 0;
};

}  // namespace

EpisodeReport run_episode(const Scene& scene, const PolicyFlags& flags, const EpisodeLimits& limits,
                          const SimParams& params) {
  if (limits.max_attempts < 0 || limits.max_consecutive_failures < 1 || limits.max_reselections < 0)
    throw DomainError("invalid episode limits");
  return Episode(scene, flags, limits, params).run();
}

}  // namespace binpick
