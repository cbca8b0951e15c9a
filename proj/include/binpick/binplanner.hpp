#pragma once

#include <variant>

#include "binpick/bin_model.hpp"
#include "binpick/collision.hpp"
#include "binpick/gripper.hpp"

namespace binpick {

struct PlannerParams {
  double cone_deg = 30.0;
  double push_clearance = 0.03;
  double lift_height = kDefaultLiftHeight;
  double push_retreat = 0.05;  // lift after the push before reconfiguring
  GripperGeometry gripper;
};

struct RefinedGrasp {
  Pose pose;          // end effector in the camera frame (includes the yaw)
  Pose pose_in_bin;   // same, in the bin frame
  double angle_deg = 0.0;
  GripperConfig config;
  PlanMode mode = PlanMode::kSuction;
  RegionTag region;
};

/// Push toward the bin center followed by a top-down finger regrasp.
struct PushRequest {
  RefinedGrasp push;      // pose and config used while pushing
  Vec3 direction_bin;     // horizontal unit vector
  Vec3 direction_cam;
  double distance = 0.0;
  RefinedGrasp regrasp;   // finger grasp at the pushed location
};

using FingerRefinement = std::variant<RefinedGrasp, PushRequest>;

/// Region of a camera-frame point. Throws OutOfBinError.
RegionTag classify_region(const Vec3& p_cam, const BinModel& bin);

/// Yaw in [-180, 180) that turns the flat side toward the wall (edge) or the
/// corner bisector. Throws InteriorRegionError for interior regions.
double safe_angle(const RegionTag& region, const BinModel& bin);

/// True iff the horizontal part of the normal exceeds sin(cone_deg) and points
/// within 90 degrees of the region's outward direction.
bool normal_faces_wall(const Vec3& n_cam, const RegionTag& region, const BinModel& bin, double cone_deg);

/// Suction grasp along -n_cam with yaw phi, configuration (s_out, f_open, f_dft).
RefinedGrasp suction_grasp(const Vec3& p_cam, const Vec3& n_cam, double phi_deg, const BinModel& bin);
/// Top-down finger grasp with terminal configuration (s_in, f_close, f_dft).
RefinedGrasp finger_grasp(const Vec3& p_cam, double phi_deg, const BinModel& bin);

/// Vertical suction approach at the safe angle with rotated fingers. Throws
/// InteriorRegionError for interior points.
RefinedGrasp safe_suction_grasp(const Vec3& p_cam, const BinModel& bin);

/// Keeps the suction grasp unless it sits in an edge/corner region with a
/// wall-facing normal, in which case it switches to a vertical approach at the
/// safe angle with rotated fingers.
RefinedGrasp refine_suction(const Vec3& p_cam, const Vec3& n_cam, double phi_deg, const BinModel& bin,
                            const PlannerParams& params = {});

/// refine_suction followed by the wall check: when the kept grasp would still
/// hit a wall outside the interior, switch to safe_suction_grasp.
RefinedGrasp avoid_suction(const Vec3& p_cam, const Vec3& n_cam, double phi_deg, const BinModel& bin,
                           const PlannerParams& params = {});

/// Push distance along `dir` (toward the center): the distance needed to leave
/// the collision region plus `clearance`, capped at the distance to the center.
double push_distance(const Vec3& p_bin, const Vec3& dir, const BinModel& bin, double clearance);

/// Top-down finger grasp, or a push request when the open gripper would hit a wall.
FingerRefinement refine_finger(const Vec3& p_cam, double phi_deg, const BinModel& bin,
                               const PlannerParams& params = {});

/// The open approach configuration used while descending for a refined grasp.
GripperConfig approach_config(const RefinedGrasp& g);

bool grasp_hits_walls(const RefinedGrasp& g, const BinModel& bin, const GripperGeometry& geom);

GraspPlan make_plan(const RefinedGrasp& g, const BinModel& bin, const PlannerParams& params = {});
GraspPlan make_plan(const PushRequest& r, const BinModel& bin, const PlannerParams& params = {});

}  // namespace binpick
