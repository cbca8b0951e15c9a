#pragma once

#include <vector>

#include "binpick/bin_model.hpp"
#include "binpick/gripper.hpp"

namespace binpick {

/// Oriented box: `axes` columns are the box axes in the parent frame.
struct Obb {
  Vec3 center = Vec3::Zero();
  Mat3 axes = Mat3::Identity();
  Vec3 half = Vec3::Zero();
};

/// Separating-axis test. Boxes that merely touch do not intersect.
bool intersects(const Obb& a, const Obb& b);

/// Simplified kinematic volume model of the gripper. End-effector frame:
/// origin at the grasp point, +z along the approach direction (into the
/// object), fingers close along x, and the flat side of the body faces +y.
struct GripperGeometry {
  double cup_radius = 0.015;
  double stroke = 0.10;          // suction-cup reciprocation
  double finger_thickness = 0.01;
  double finger_width = 0.02;
  double finger_reach = 0.08;
  double finger_grasp_depth = 0.02;  // fingertips below the grasp point in finger mode
  double span_open = 0.10;
  double span_closed = 0.01;
  double body_half_x = 0.03;
  double body_back = 0.03;       // body extent on the -y side
  double body_flat = 0.008;      // body extent on the flat +y side
  double body_height = 0.10;

  void validate() const;
};

/// Solids of the gripper in the parent frame of `ee_pose`. The cup is boxed by
/// its bounding square prism.
std::vector<Obb> gripper_parts(const Pose& ee_pose, const GripperConfig& config, const GripperGeometry& geom);

/// The four wall slabs of the bin, in the bin frame.
std::vector<Obb> wall_slabs(const BinModel& bin);

/// True iff any gripper solid intersects a wall slab. `ee_in_bin` already
/// includes the rotation about the approach axis.
bool gripper_hits_walls(const Pose& ee_in_bin, const GripperConfig& config, const BinModel& bin,
                        const GripperGeometry& geom);

/// Reference orientation for a vertical (top-down) approach in the bin frame,
/// rotated by `phi_deg` about the approach axis. With this convention the
/// flat side points along (sin phi, cos phi, 0) and the fingers close along
/// (-cos phi, sin phi, 0).
Mat3 top_down_rotation(double phi_deg);
/// Approach along -normal (normal points out of the surface) with yaw `phi_deg`
/// measured as in top_down_rotation.
Mat3 approach_rotation(const Vec3& normal_bin, double phi_deg);

/// Horizontal direction of the flat side for yaw `phi_deg`.
Vec3 flat_side_direction(double phi_deg);
/// Horizontal closing-axis direction for yaw `phi_deg`.
Vec3 closing_axis_direction(double phi_deg);

}  // namespace binpick
