#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "binpick/affordance.hpp"
#include "binpick/bin_model.hpp"
#include "binpick/binplanner.hpp"
#include "binpick/collision.hpp"
#include "binpick/gripper.hpp"
#include "binpick/image.hpp"
#include "binpick/material.hpp"

namespace binpick {

// ---------------------------------------------------------------------------
// Scene model

enum class ShapeKind : std::uint8_t { kBox, kCylinder };

/// Object resting on the bin floor. Boxes use dims (lx, ly, lz). Cylinders lie
/// on their side with the axis along local x and use dims (radius, length, -).
struct SceneObject {
  int id = 0;
  ShapeKind shape = ShapeKind::kBox;
  Vec3 dims = Vec3::Zero();
  Pose pose;  // bin frame, object center; rotation about z only
  double mass = 0.1;
  MaterialClass material = MaterialClass::kOther;
  double graspable_width = 0.0;

  /// Half extents of the footprint rectangle in the object's local x/y.
  Vec2 footprint_half() const;
  double top_height() const;
  /// Local axis (0 = x, 1 = y) the fingers close along.
  int grip_axis() const;
  double yaw_deg() const;
};

struct Scene {
  BinModel bin;
  std::vector<SceneObject> objects;
  std::uint64_t rng_seed = 0;
};

struct SceneSpec {
  int object_count = 10;
  double box_fraction = 0.7;
  double box_side_min = 0.03;
  double box_side_max = 0.10;
  double box_height_min = 0.02;
  double box_height_max = 0.08;
  double cylinder_radius_min = 0.008;
  double cylinder_radius_max = 0.03;
  double cylinder_length_min = 0.06;
  double cylinder_length_max = 0.14;
  double corner_bias = 0.0;          // fraction of objects centered in a corner region
  double metallic_fraction = 0.2;
  double transparent_fraction = 0.1;
  double density_min = 200.0;        // kg/m^3
  double density_max = 1200.0;
  double metallic_density = 3000.0;
  double wall_clearance = 0.005;
  int max_tries = 200;

  void validate() const;
};

/// Sequential rejection placement, deterministic in `seed`. Throws
/// PlacementError when an object cannot be placed within `max_tries`.
Scene generate_scene(std::uint64_t seed, const SceneSpec& spec, const BinModel& bin);

/// Footprint overlap depth between two objects (0 when separated).
double footprint_penetration(const SceneObject& a, const SceneObject& b);

// ---------------------------------------------------------------------------
// Rendering

struct CameraSetup {
  Pose cam_from_bin;  // world (bin) -> camera
  CameraIntrinsics K;
};

/// Camera above the bin center looking straight down; image x along bin +x.
CameraSetup top_down_camera(const BinModel& bin, double height = 0.9, int width = 320, int height_px = 240,
                            double focal = 400.0);

inline constexpr int kHitNone = -3;
inline constexpr int kHitWall = -2;
inline constexpr int kHitFloor = -1;

struct RenderOptions {
  double transparent_dropout = 0.7;
  std::uint64_t noise_seed = 0;
};

struct RenderBuffers {
  DepthImage depth;             // with transparent dropout applied
  std::vector<int> hit;         // object index into Scene::objects, or kHit*
  std::vector<Vec3> point_bin;  // exact hit point
  std::vector<Vec3> normal_bin;
  RgbImage rgb;
};

RenderBuffers render_scene(const Scene& scene, const Pose& cam, const CameraIntrinsics& K,
                           const RenderOptions& opts = {});

DepthImage render_depth(const Scene& scene, const Pose& cam, const CameraIntrinsics& K,
                        const RenderOptions& opts = {});

// ---------------------------------------------------------------------------
// Oracle affordances

struct OracleParams {
  GripperGeometry gripper;
  double max_plane_residual = 0.001;
  int window = 11;
  double min_top_normal_z = 0.9;
};

/// Horizontal distance from a point to the edge of the object's footprint.
double footprint_edge_distance(const SceneObject& obj, const Vec3& p_bin);
/// Suction success probability for an accepted top-surface pixel.
double suction_success_probability(double edge_distance, double cup_radius);
/// Finger success probability at `p_bin` on object `index`, or nullopt when the
/// antipodal rule fails (width, centering or finger clearance).
std::optional<double> finger_success_probability(const Scene& scene, std::size_t index, const Vec3& p_bin,
                                                 const GripperGeometry& gripper);
/// Gripper yaw, folded into [-90, 90), that closes across the object's grip axis.
double grip_angle(const SceneObject& obj);

/// Rule-based stand-in for the learned affordance network.
AffordanceBundle oracle_affordance(const Scene& scene, const DepthImage& depth, const Pose& cam,
                                   const CameraIntrinsics& K, const OracleParams& params = {});
/// Same, reusing geometry buffers already rendered from the same camera.
AffordanceBundle oracle_affordance(const Scene& scene, const RenderBuffers& geometry, const DepthImage& depth,
                                   const CameraIntrinsics& K, const OracleParams& params = {});

// ---------------------------------------------------------------------------
// Collision and episodes

/// `approach_in_bin` is the end-effector pose before the yaw `phi_deg` about its
/// approach axis. Checks the gripper solids against the bin walls.
bool check_gripper_collision(const Pose& approach_in_bin, const GripperConfig& config, double phi_deg,
                             const Scene& scene, const GripperGeometry& geom = {});

struct PolicyFlags {
  bool avoidance = true;
  bool greedy = false;
  double eps_s = kDefaultSuctionThreshold;
  bool fusion = false;  // fuse suction picks with a finger close when the object fits
};

struct EpisodeLimits {
  int max_attempts = 40;
  int max_consecutive_failures = 3;
  int max_reselections = 25;
  int exclusion_radius_px = 3;
};

struct SimParams {
  CameraSetup camera;
  GripperGeometry gripper;
  HoldModel hold;
  PlannerParams planner;
  OracleParams oracle;
  HeuristicThresholds material;
  double lift_accel = 5.0;  // m/s^2
  double min_prob = 0.5;    // candidate mask threshold
  int crop_px = 24;
  double transparent_dropout = 0.7;
  double push_step = 0.002; // back-off step for push penetration resolution

  /// Defaults tied to `bin` (camera above the bin, shared gripper geometry).
  static SimParams defaults_for(const BinModel& bin);
};

enum class GraspType : std::uint8_t { kSuction, kSuctionCa, kFinger, kPush, kMagnetic };
inline constexpr std::array<GraspType, 5> kGraspTypes{GraspType::kSuction, GraspType::kSuctionCa, GraspType::kFinger,
                                                      GraspType::kPush, GraspType::kMagnetic};
std::string_view to_string(GraspType t);

struct AttemptTrace {
  int attempt = 0;
  Pixel pixel;
  GraspType type = GraspType::kSuction;
  int object_id = -1;
  MaterialClass material = MaterialClass::kOther;  // classifier output
  bool collision = false;
  bool success = false;
  std::string outcome;
};

struct EpisodeReport {
  int attempts = 0;
  int successes = 0;
  int objects_cleared = 0;
  int objects_total = 0;
  int objects_penalized = 0;
  int objects_remaining = 0;
  double success_rate = 0.0;
  double clear_rate = 0.0;
  std::array<int, 5> grasp_type_histogram{};
  int collision_events = 0;
  std::vector<AttemptTrace> trace;
  std::optional<Pose> last_gripper_pose;  // bin frame, for scene export
  Scene final_scene;
};

EpisodeReport run_episode(const Scene& scene, const PolicyFlags& flags, const EpisodeLimits& limits,
                          const SimParams& params);

}  // namespace binpick
