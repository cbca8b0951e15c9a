#include "binpick/binplanner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace binpick {

namespace {

Vec3 to_bin(const Vec3& p_cam, const BinModel& bin) { return bin.pose_cam_from_bin.inverse() * p_cam; }

RefinedGrasp make_grasp(const Pose& ee_in_bin, double phi, const GripperConfig& config, PlanMode mode,
                        const RegionTag& region, const BinModel& bin) {
  RefinedGrasp g;
  g.pose_in_bin = ee_in_bin;
  g.pose = bin.pose_cam_from_bin * ee_in_bin;
  g.angle_deg = phi;
  g.config = config;
  g.mode = mode;
  g.region = region;
  return g;
}

double yaw_facing(const Vec3& dir) { return wrap_degrees(rad2deg(std::atan2(dir.x(), dir.y()))); }

}  // namespace

RegionTag classify_region(const Vec3& p_cam, const BinModel& bin) { return classify_region_bin(to_bin(p_cam, bin), bin); }

double safe_angle(const RegionTag& region, const BinModel&) {
  if (region.is_interior()) throw InteriorRegionError("safe angle is undefined for interior grasps");
  return yaw_facing(region.outward_direction());
}

bool normal_faces_wall(const Vec3& n_cam, const RegionTag& region, const BinModel& bin, double cone_deg) {
  if (region.is_interior()) return false;
  const Vec3 n = bin.pose_cam_from_bin.rotation().transpose() * n_cam;
  const Vec3 h(n.x(), n.y(), 0.0);
  if (!(h.norm() > std::sin(deg2rad(cone_deg)))) return false;
  return h.dot(region.outward_direction()) > 0.0;
}

RefinedGrasp suction_grasp(const Vec3& p_cam, const Vec3& n_cam, double phi_deg, const BinModel& bin) {
  const Vec3 p = to_bin(p_cam, bin);
  const RegionTag region = classify_region_bin(p, bin);
  const Vec3 n = bin.pose_cam_from_bin.rotation().transpose() * n_cam;
  return make_grasp(Pose(approach_rotation(n, phi_deg), p), phi_deg, configs::kSuctionApproach, PlanMode::kSuction,
                    region, bin);
}

RefinedGrasp finger_grasp(const Vec3& p_cam, double phi_deg, const BinModel& bin) {
  const Vec3 p = to_bin(p_cam, bin);
  const RegionTag region = classify_region_bin(p, bin);
  return make_grasp(Pose(top_down_rotation(phi_deg), p), phi_deg, configs::kFingerClosed, PlanMode::kFinger, region,
                    bin);
}

RefinedGrasp safe_suction_grasp(const Vec3& p_cam, const BinModel& bin) {
  const Vec3 p = to_bin(p_cam, bin);
  const RegionTag region = classify_region_bin(p, bin);
  const double phi_safe = safe_angle(region, bin);
  return make_grasp(Pose(top_down_rotation(phi_safe), p), phi_safe, configs::kSuctionSafe, PlanMode::kSuctionCa,
                    region, bin);
}

RefinedGrasp refine_suction(const Vec3& p_cam, const Vec3& n_cam, double phi_deg, const BinModel& bin,
                            const PlannerParams& params) {
  const RegionTag region = classify_region(p_cam, bin);
  if (region.is_interior() || !normal_faces_wall(n_cam, region, bin, params.cone_deg))
    return suction_grasp(p_cam, n_cam, phi_deg, bin);
  return safe_suction_grasp(p_cam, bin);
}

RefinedGrasp avoid_suction(const Vec3& p_cam, const Vec3& n_cam, double phi_deg, const BinModel& bin,
                           const PlannerParams& params) {
  RefinedGrasp g = refine_suction(p_cam, n_cam, phi_deg, bin, params);
  if (g.mode == PlanMode::kSuction && !g.region.is_interior() && grasp_hits_walls(g, bin, params.gripper))
    return safe_suction_grasp(p_cam, bin);
  return g;
}

double push_distance(const Vec3& p, const Vec3& dir, const BinModel& bin, double clearance) {
  double exit = 0.0;
  const double L = bin.inner_length;
  const double W = bin.inner_width;
  const double m = bin.margin;
  if (p.x() < m && dir.x() > 0.0) exit = std::max(exit, (m - p.x()) / dir.x());
  if (L - p.x() < m && dir.x() < 0.0) exit = std::max(exit, (L - m - p.x()) / dir.x());
  if (p.y() < m && dir.y() > 0.0) exit = std::max(exit, (m - p.y()) / dir.y());
  if (W - p.y() < m && dir.y() < 0.0) exit = std::max(exit, (W - m - p.y()) / dir.y());
  const Vec3 c = bin.center();
  const double to_center = Vec3(c.x() - p.x(), c.y() - p.y(), 0.0).norm();
  return std::min(exit + clearance, to_center);
}

GripperConfig approach_config(const RefinedGrasp& g) {
  GripperConfig c = g.config;
  c.aperture = Aperture::kOpen;
  return c;
}

bool grasp_hits_walls(const RefinedGrasp& g, const BinModel& bin, const GripperGeometry& geom) {
  return gripper_hits_walls(g.pose_in_bin, approach_config(g), bin, geom);
}

FingerRefinement refine_finger(const Vec3& p_cam, double phi_deg, const BinModel& bin, const PlannerParams& params) {
  const RefinedGrasp direct = finger_grasp(p_cam, phi_deg, bin);
  if (!grasp_hits_walls(direct, bin, params.gripper)) return direct;

  const Vec3 p = direct.pose_in_bin.translation();
  const Vec3 c = bin.center();
  Vec3 dir(c.x() - p.x(), c.y() - p.y(), 0.0);
  if (dir.norm() < 1e-12) return direct;  // already at the center; nothing to push toward
  dir.normalize();

  PushRequest req;
  const double phi_safe = direct.region.is_interior() ? yaw_facing(-dir) : safe_angle(direct.region, bin);
  req.push = make_grasp(Pose(top_down_rotation(phi_safe), p), phi_safe, configs::kSuctionSafe,
                        PlanMode::kPushThenFinger, direct.region, bin);
  req.direction_bin = dir;
  req.direction_cam = bin.pose_cam_from_bin.rotation() * dir;
  req.distance = push_distance(p, dir, bin, params.push_clearance);
  const Vec3 q = p + req.distance * dir;
  req.regrasp = make_grasp(Pose(top_down_rotation(phi_deg), q), phi_deg, configs::kFingerClosed,
                           PlanMode::kPushThenFinger, classify_region_bin(q, bin), bin);
  return req;
}

GraspPlan make_plan(const RefinedGrasp& g, const BinModel& bin, const PlannerParams& params) {
  GraspPlan plan = g.config.aperture == Aperture::kClose ? finger_sequence(g.pose, params.lift_height)
                                                         : suction_sequence(g.pose, g.config, g.mode, params.lift_height);
  plan.mode = g.mode;
  plan.expected_collision_free = !grasp_hits_walls(g, bin, params.gripper);
  return plan;
}

GraspPlan make_plan(const PushRequest& r, const BinModel& bin, const PlannerParams& params) {
  GraspPlan plan;
  plan.mode = PlanMode::kPushThenFinger;
  plan.steps = {step::SetConfig{configs::kSuctionSafe},
                step::MoveTo{r.push.pose},
                step::Push{r.direction_cam, r.distance},
                step::Lift{params.push_retreat},
                step::SetConfig{configs::kSuctionApproach},
                step::SetConfig{configs::kFingerApproach},
                step::MoveTo{r.regrasp.pose},
                step::CloseFingers{},
                step::Lift{params.lift_height}};
  plan.expected_collision_free =
      !grasp_hits_walls(r.push, bin, params.gripper) && !grasp_hits_walls(r.regrasp, bin, params.gripper);
  return plan;
}

}  // namespace binpick
