#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "binpick/geometry.hpp"

namespace binpick {

/// Open-top rectangular bin. The bin frame has its origin at the inner
/// marker corner, x along the length, y along the width and z up; the floor
/// is the z = 0 plane.
struct BinModel {
  Pose pose_cam_from_bin;     // T_b^c: bin frame -> camera frame
  double inner_length = 0.40; // x extent (m)
  double inner_width = 0.30;  // y extent (m)
  double wall_height = 0.25;
  double margin = 0.06;       // collision-region width from each wall
  double wall_thickness = 0.02;

  /// Throws DomainError on non-positive sizes or margin >= min(extent)/2.
  void validate() const;
  Vec3 center() const { return {inner_length / 2.0, inner_width / 2.0, 0.0}; }
};

enum class Side : std::uint8_t { kPosX, kNegX, kPosY, kNegY };

std::string_view to_string(Side s);
/// Outward wall normal in the bin frame (horizontal unit vector).
Vec3 outward_normal(Side s);

struct RegionTag {
  enum class Kind : std::uint8_t { kInterior, kEdge, kCorner };
  Kind kind = Kind::kInterior;
  // Edge: sides[0]. Corner: x-side in sides[0], y-side in sides[1].
  std::array<Side, 2> sides{Side::kNegX, Side::kNegY};

  static RegionTag interior() { return {}; }
  static RegionTag edge(Side s) { return {Kind::kEdge, {s, s}}; }
  static RegionTag corner(Side x_side, Side y_side) { return {Kind::kCorner, {x_side, y_side}}; }

  bool is_interior() const { return kind == Kind::kInterior; }
  /// Outward wall normal (edge) or normalized corner bisector (corner).
  Vec3 outward_direction() const;
  std::string to_string() const;

  friend bool operator==(const RegionTag& a, const RegionTag& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == Kind::kInterior) return true;
    if (a.kind == Kind::kEdge) return a.sides[0] == b.sides[0];
    return a.sides == b.sides;
  }
};

/// Classifies a bin-frame point (horizontal position only). A point exactly at
/// the margin distance is interior. Throws OutOfBinError outside [0,L]x[0,W].
RegionTag classify_region_bin(const Vec3& p_bin, const BinModel& bin);

}  // namespace binpick
