#include "binpick/collision.hpp"

#include <cmath>
#include <optional>

namespace binpick {

void BinModel::validate() const {
  if (!(inner_length > 0.0 && inner_width > 0.0 && wall_height > 0.0 && margin > 0.0 && wall_thickness > 0.0))
    throw DomainError("bin dimensions and margin must be positive");
  if (!(margin < std::min(inner_length, inner_width) / 2.0))
    throw DomainError("bin margin must be below half the smaller extent");
  if (!pose_cam_from_bin.is_finite()) throw DomainError("bin pose is not finite");
}

std::string_view to_string(Side s) {
  switch (s) {
    case Side::kPosX: return "+x";
    case Side::kNegX: return "-x";
    case Side::kPosY: return "+y";
    case Side::kNegY: return "-y";
  }
  return "?";
}

Vec3 outward_normal(Side s) {
  switch (s) {
    case Side::kPosX: return {1, 0, 0};
    case Side::kNegX: return {-1, 0, 0};
    case Side::kPosY: return {0, 1, 0};
    case Side::kNegY: return {0, -1, 0};
  }
  return Vec3::Zero();
}

Vec3 RegionTag::outward_direction() const {
  switch (kind) {
    case Kind::kInterior: return Vec3::Zero();
    case Kind::kEdge: return outward_normal(sides[0]);
    case Kind::kCorner: return (outward_normal(sides[0]) + outward_normal(sides[1])).normalized();
  }
  return Vec3::Zero();
}

std::string RegionTag::to_string() const {
  switch (kind) {
    case Kind::kInterior: return "interior";
    case Kind::kEdge: return "edge(" + std::string(binpick::to_string(sides[0])) + ")";
    case Kind::kCorner:
      return "corner(" + std::string(binpick::to_string(sides[0])) + "," + std::string(binpick::to_string(sides[1])) +
             ")";
  }
  return "?";
}

RegionTag classify_region_bin(const Vec3& p, const BinModel& bin) {
  if (!p.allFinite() || p.x() < 0.0 || p.y() < 0.0 || p.x() > bin.inner_length || p.y() > bin.inner_width)
    throw OutOfBinError("point lies outside the bin footprint");
  std::optional<Side> xs;
  std::optional<Side> ys;
  if (p.x() < bin.margin) xs = Side::kNegX;
  else if (bin.inner_length - p.x() < bin.margin) xs = Side::kPosX;
  if (p.y() < bin.margin) ys = Side::kNegY;
  else if (bin.inner_width - p.y() < bin.margin) ys = Side::kPosY;
  if (xs && ys) return RegionTag::corner(*xs, *ys);
  if (xs) return RegionTag::edge(*xs);
  if (ys) return RegionTag::edge(*ys);
  return RegionTag::interior();
}

bool intersects(const Obb& a, const Obb& b) {
  constexpr double kEps = 1e-12;
  const Mat3 R = a.axes.transpose() * b.axes;
  const Vec3 t = a.axes.transpose() * (b.center - a.center);
  const Mat3 absR = R.cwiseAbs().array() + kEps;
  const Vec3& ea = a.half;
  const Vec3& eb = b.half;

  for (int i = 0; i < 3; ++i) {
    if (std::abs(t[i]) >= ea[i] + absR.row(i).dot(eb)) return false;
  }
  for (int j = 0; j < 3; ++j) {
    if (std::abs(t.dot(R.col(j))) >= absR.col(j).dot(ea) + eb[j]) return false;
  }
  for (int i = 0; i < 3; ++i) {
    const int i1 = (i + 1) % 3;
    const int i2 = (i + 2) % 3;
    for (int j = 0; j < 3; ++j) {
      const int j1 = (j + 1) % 3;
      const int j2 = (j + 2) % 3;
      const double ra = ea[i1] * absR(i2, j) + ea[i2] * absR(i1, j);
      const double rb = eb[j1] * absR(i, j2) + eb[j2] * absR(i, j1);
      if (std::abs(t[i2] * R(i1, j) - t[i1] * R(i2, j)) >= ra + rb) return false;
    }
  }
  return true;
}

void GripperGeometry::validate() const {
  if (!(cup_radius > 0 && stroke > 0 && finger_thickness > 0 && finger_width > 0 && finger_reach > 0 &&
        finger_grasp_depth >= 0 && span_closed > 0 && span_open > span_closed && body_half_x > 0 &&
        body_back > 0 && body_flat > 0 && body_height > 0))
    throw DomainError("invalid gripper geometry");
}

std::vector<Obb> gripper_parts(const Pose& ee_pose, const GripperConfig& config, const GripperGeometry& g) {
  std::vector<Obb> local;
  const bool cup_out = config.suction == SuctionState::kOut;
  const double palm = cup_out ? -g.stroke : g.finger_grasp_depth - g.finger_reach;

  if (cup_out) local.push_back({Vec3(0, 0, -g.stroke / 2.0), Mat3::Identity(), Vec3(g.cup_radius, g.cup_radius, g.stroke / 2.0)});

  const double fz = palm + g.finger_reach / 2.0;
  if (config.rotation == FingerRotation::kDefault) {
    const double span = config.aperture == Aperture::kOpen ? g.span_open : g.span_closed;
    const double fx = span / 2.0 + g.finger_thickness / 2.0;
    const Vec3 half(g.finger_thickness / 2.0, g.finger_width / 2.0, g.finger_reach / 2.0);
    local.push_back({Vec3(fx, 0, fz), Mat3::Identity(), half});
    local.push_back({Vec3(-fx, 0, fz), Mat3::Identity(), half});
  } else {
    // rotated fingers sit against the back of the body, away from the flat side
    const double fy = -(g.body_back - g.finger_thickness / 2.0);
    const double fx = g.body_half_x - g.finger_width / 2.0;
    const Vec3 half(g.finger_width / 2.0, g.finger_thickness / 2.0, g.finger_reach / 2.0);
    local.push_back({Vec3(fx, fy, fz), Mat3::Identity(), half});
    local.push_back({Vec3(-fx, fy, fz), Mat3::Identity(), half});
  }

  local.push_back({Vec3(0, (g.body_flat - g.body_back) / 2.0, palm - g.body_height / 2.0), Mat3::Identity(),
                   Vec3(g.body_half_x, (g.body_flat + g.body_back) / 2.0, g.body_height / 2.0)});

  for (auto& box : local) {
    box.center = ee_pose * box.center;
    box.axes = ee_pose.rotation() * box.axes;
  }
  return local;
}

std::vector<Obb> wall_slabs(const BinModel& bin) {
  const double T = bin.wall_thickness;
  const double L = bin.inner_length;
  const double W = bin.inner_width;
  const double H = bin.wall_height;
  auto slab = [](Vec3 lo, Vec3 hi) { return Obb{(lo + hi) / 2.0, Mat3::Identity(), (hi - lo) / 2.0}; };
  return {slab({-T, -T, 0}, {0, W + T, H}), slab({L, -T, 0}, {L + T, W + T, H}),
          slab({-T, -T, 0}, {L + T, 0, H}), slab({-T, W, 0}, {L + T, W + T, H})};
}

bool gripper_hits_walls(const Pose& ee_in_bin, const GripperConfig& config, const BinModel& bin,
                        const GripperGeometry& geom) {
  const auto walls = wall_slabs(bin);
  for (const auto& part : gripper_parts(ee_in_bin, config, geom))
    for (const auto& w : walls)
      if (intersects(part, w)) return true;
  return false;
}

Mat3 top_down_rotation(double phi_deg) {
  Mat3 r0 = Vec3(-1.0, 1.0, -1.0).asDiagonal();
  return r0 * Pose::rot_z(phi_deg).rotation();
}

Mat3 approach_rotation(const Vec3& normal_bin, double phi_deg) {
  const Mat3 ref = top_down_rotation(phi_deg);
  const Vec3 z = -normal_bin.normalized();
  Vec3 x = ref.col(0) - ref.col(0).dot(z) * z;
  if (x.norm() < 1e-9) x = ref.col(1) - ref.col(1).dot(z) * z;
  x.normalize();
  Mat3 R;
  R.col(0) = x;
  R.col(1) = z.cross(x);
  R.col(2) = z;
  return R;
}

Vec3 flat_side_direction(double phi_deg) {
  const double r = deg2rad(phi_deg);
  return {std::sin(r), std::cos(r), 0.0};
}

Vec3 closing_axis_direction(double phi_deg) {
  const double r = deg2rad(phi_deg);
  return {-std::cos(r), std::sin(r), 0.0};
}

}  // namespace binpick
