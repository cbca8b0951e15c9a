#include <algorithm>
#include <cmath>
#include <string>

#include "binpick/rng.hpp"
#include "binpick/sim.hpp"

namespace binpick {

Vec2 SceneObject::footprint_half() const {
  if (shape == ShapeKind::kBox) return {dims.x() / 2.0, dims.y() / 2.0};
  return {dims.y() / 2.0, dims.x()};
}

double SceneObject::top_height() const { return shape == ShapeKind::kBox ? dims.z() : 2.0 * dims.x(); }

int SceneObject::grip_axis() const {
  const Vec2 h = footprint_half();
  return h.x() < h.y() ? 0 : 1;
}

double SceneObject::yaw_deg() const {
  const Mat3& R = pose.rotation();
  return rad2deg(std::atan2(R(1, 0), R(0, 0)));
}

void SceneSpec::validate() const {
  if (object_count < 1) throw DomainError("scene needs at least one object");
  if (!(box_side_min > 0 && box_side_max >= box_side_min && box_height_min > 0 && box_height_max >= box_height_min &&
        cylinder_radius_min > 0 && cylinder_radius_max >= cylinder_radius_min && cylinder_length_min > 0 &&
        cylinder_length_max >= cylinder_length_min))
    throw DomainError("object size ranges must be positive and ordered");
  if (!(corner_bias >= 0 && corner_bias <= 1 && box_fraction >= 0 && box_fraction <= 1 && metallic_fraction >= 0 &&
        transparent_fraction >= 0 && metallic_fraction + transparent_fraction <= 1))
    throw DomainError("fractions must lie in [0,1]");
  if (!(density_min > 0 && density_max >= density_min && metallic_density > 0 && wall_clearance >= 0 &&
        max_tries > 0))
    throw DomainError("invalid density, clearance or try budget");
}

namespace {

struct Rect2 {
  Vec2 center;
  Vec2 axis_u;  // unit
  Vec2 axis_v;  // unit, perpendicular
  Vec2 half;
};

Rect2 footprint(const SceneObject& o) {
  const Mat3& R = o.pose.rotation();
  return {o.pose.translation().head<2>(), R.block<2, 1>(0, 0).normalized(), R.block<2, 1>(0, 1).normalized(),
          o.footprint_half()};
}

double rect_penetration(const Rect2& a, const Rect2& b) {
  const Vec2 d = b.center - a.center;
  double best = 1e300;
  for (const Vec2& axis : {a.axis_u, a.axis_v, b.axis_u, b.axis_v}) {
    const double ra = a.half.x() * std::abs(a.axis_u.dot(axis)) + a.half.y() * std::abs(a.axis_v.dot(axis));
    const double rb = b.half.x() * std::abs(b.axis_u.dot(axis)) + b.half.y() * std::abs(b.axis_v.dot(axis));
    const double overlap = ra + rb - std::abs(d.dot(axis));
    if (overlap <= 0.0) return 0.0;
    best = std::min(best, overlap);
  }
  return best;
}

}  // namespace

double footprint_penetration(const SceneObject& a, const SceneObject& b) {
  return rect_penetration(footprint(a), footprint(b));
}

Scene generate_scene(std::uint64_t seed, const SceneSpec& spec, const BinModel& bin) {
  spec.validate();
  bin.validate();
  Rng rng(seed);
  Scene scene{bin, {}, seed};
  const double L = bin.inner_length;
  const double W = bin.inner_width;
  const double clear = spec.wall_clearance;

  for (int i = 0; i < spec.object_count; ++i) {
    const bool corner = rng.bernoulli(spec.corner_bias);
    bool placed = false;
    for (int attempt = 0; attempt < spec.max_tries && !placed; ++attempt) {
      SceneObject o;
      o.id = i;
      const double mu = rng.uniform();
      o.material = mu < spec.metallic_fraction                              ? MaterialClass::kMetallic
                   : mu < spec.metallic_fraction + spec.transparent_fraction ? MaterialClass::kTransparent
                                                                             : MaterialClass::kOther;
      const bool metallic = o.material == MaterialClass::kMetallic;
      o.shape = rng.bernoulli(spec.box_fraction) ? ShapeKind::kBox : ShapeKind::kCylinder;
      double volume = 0.0;
      if (o.shape == ShapeKind::kBox) {
        const double side_max = metallic ? (spec.box_side_min + spec.box_side_max) / 2.0 : spec.box_side_max;
        o.dims = {rng.uniform(spec.box_side_min, side_max), rng.uniform(spec.box_side_min, side_max),
                  rng.uniform(spec.box_height_min, spec.box_height_max)};
        volume = o.dims.prod();
      } else {
        o.dims = {rng.uniform(spec.cylinder_radius_min, spec.cylinder_radius_max),
                  rng.uniform(spec.cylinder_length_min, spec.cylinder_length_max), 0.0};
        volume = 3.14159265358979323846 * o.dims.x() * o.dims.x() * o.dims.y();
      }
      const double density = metallic ? spec.metallic_density : rng.uniform(spec.density_min, spec.density_max);
      o.mass = density * volume;
      const double yaw = rng.uniform(-180.0, 180.0);
      const Vec2 fh = o.footprint_half();
      o.graspable_width = 2.0 * fh[o.grip_axis()];
      const double c = std::abs(std::cos(deg2rad(yaw)));
      const double s = std::abs(std::sin(deg2rad(yaw)));
      const double hx = c * fh.x() + s * fh.y();
      const double hy = s * fh.x() + c * fh.y();

      double cx = 0.0;
      double cy = 0.0;
      // Corner requests that keep failing (all four corners taken) fall back to uniform placement.
      if (corner && attempt < spec.max_tries / 2) {
        if (clear + hx >= bin.margin || clear + hy >= bin.margin) continue;
        const auto k = rng.below(4);
        const double dx = clear + hx + rng.uniform() * (bin.margin - clear - hx);
        const double dy = clear + hy + rng.uniform() * (bin.margin - clear - hy);
        cx = (k & 1u) ? L - dx : dx;
        cy = (k & 2u) ? W - dy : dy;
      } else {
        if (L - 2 * (clear + hx) <= 0 || W - 2 * (clear + hy) <= 0) continue;
        cx = rng.uniform(clear + hx, L - clear - hx);
        cy = rng.uniform(clear + hy, W - clear - hy);
      }
      const double z = o.shape == ShapeKind::kBox ? o.dims.z() / 2.0 : o.dims.x();
      o.pose = Pose::rot_z(yaw, Vec3(cx, cy, z));

      bool free = true;
      for (const auto& other : scene.objects) {
        if (footprint_penetration(o, other) > 0.0) {
          free = false;
          break;
        }
      }
      if (!free) continue;
      scene.objects.push_back(o);
      placed = true;
    }
    if (!placed) throw PlacementError("could not place object " + std::to_string(i));
  }
  return scene;
}

double footprint_edge_distance(const SceneObject& obj, const Vec3& p_bin) {
  const Vec3 local = obj.pose.rotation().transpose() * (p_bin - obj.pose.translation());
  const Vec2 h = obj.footprint_half();
  return std::min(h.x() - std::abs(local.x()), h.y() - std::abs(local.y()));
}

double suction_success_probability(double edge_distance, double cup_radius) {
  return 0.6 + 0.3 * std::min(1.0, edge_distance / (3.0 * cup_radius));
}

std::optional<double> finger_success_probability(const Scene& scene, std::size_t index, const Vec3& p_bin,
                                                 const GripperGeometry& g) {
  const SceneObject& obj = scene.objects.at(index);
  const double w = obj.graspable_width;
  if (w < g.span_closed || w > g.span_open) return std::nullopt;
  const Mat3& R = obj.pose.rotation();
  const Vec3 local = R.transpose() * (p_bin - obj.pose.translation());
  const int a = obj.grip_axis();
  const int l = 1 - a;
  const Vec2 fh = obj.footprint_half();
  const double offset = std::abs(local[a]);
  if (offset + w / 2.0 > g.span_open / 2.0) return std::nullopt;
  if (std::abs(local[l]) > fh[l] - g.finger_width / 2.0) return std::nullopt;

  const Vec2 axis = R.block<2, 1>(0, a).normalized();
  const Vec2 along = R.block<2, 1>(0, l).normalized();
  for (double side : {-1.0, 1.0}) {
    const Rect2 finger{p_bin.head<2>() + side * axis * (g.span_open / 2.0 + g.finger_thickness / 2.0), axis, along,
                       Vec2(g.finger_thickness / 2.0, g.finger_width / 2.0)};
    for (std::size_t j = 0; j < scene.objects.size(); ++j) {
      if (j == index) continue;
      if (rect_penetration(finger, footprint(scene.objects[j])) > 0.0) return std::nullopt;
    }
  }
  const double omax = (g.span_open - w) / 2.0;
  const double q = omax > 0.0 ? 1.0 - offset / omax : 1.0;
  return 0.6 + 0.35 * q;
}

double grip_angle(const SceneObject& obj) {
  const Vec3 a = obj.pose.rotation().col(obj.grip_axis());
  return fold_degrees(rad2deg(std::atan2(a.y(), -a.x())));
}

bool check_gripper_collision(const Pose& approach_in_bin, const GripperConfig& config, double phi_deg,
                             const Scene& scene, const GripperGeometry& geom) {
  return gripper_hits_walls(approach_in_bin * Pose::rot_z(phi_deg), config, scene.bin, geom);
}

std::string_view to_string(GraspType t) {
  switch (t) {
    case GraspType::kSuction: return "suction";
    case GraspType::kSuctionCa: return "suction_ca";
    case GraspType::kFinger: return "finger";
    case GraspType::kPush: return "push";
    case GraspType::kMagnetic: return "magnetic";
  }
  return "suction";
}

CameraSetup top_down_camera(const BinModel& bin, double height, int width, int height_px, double focal) {
  // camera x = bin x, camera y = -bin y, camera z = -bin z
  Mat3 R = Vec3(1.0, -1.0, -1.0).asDiagonal();
  const Vec3 center(bin.inner_length / 2.0, bin.inner_width / 2.0, height);
  CameraSetup cam;
  cam.cam_from_bin = Pose(R, -(R * center));
  cam.K = {focal, focal, width / 2.0, height_px / 2.0, width, height_px};
  return cam;
}

SimParams SimParams::defaults_for(const BinModel& bin) {
  SimParams p;
  p.camera = top_down_camera(bin);
  p.planner.gripper = p.gripper;
  p.oracle.gripper = p.gripper;
  p.hold.finger_span_closed = p.gripper.span_closed;
  p.hold.finger_span_open = p.gripper.span_open;
  return p;
}

}  // namespace binpick
