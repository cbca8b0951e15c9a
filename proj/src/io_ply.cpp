#include <cmath>
#include <cstdio>

#include "binpick/collision.hpp"
#include "binpick/io.hpp"

namespace binpick::io {

namespace {

struct Mesh {
  struct Vertex {
    Vec3 p;
    std::array<int, 3> rgb;
  };
  std::vector<Vertex> vertices;
  std::vector<std::vector<int>> faces;

  void add_box(const Obb& b, std::array<int, 3> rgb) {
    const int base = static_cast<int>(vertices.size());
    for (int i = 0; i < 8; ++i) {
      const Vec3 s((i & 1) ? 1.0 : -1.0, (i & 2) ? 1.0 : -1.0, (i & 4) ? 1.0 : -1.0);
      vertices.push_back({b.center + b.axes * s.cwiseProduct(b.half), rgb});
    }
    static constexpr int kQuads[6][4] = {{0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4},
                                         {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}};
    for (const auto& q : kQuads) faces.push_back({base + q[0], base + q[1], base + q[2], base + q[3]});
  }

  // Cylinder with its axis along the pose's local x.
  void add_cylinder(const Pose& pose, double r, double len, std::array<int, 3> rgb, int segments = 16) {
    const int base = static_cast<int>(vertices.size());
    for (int side = 0; side < 2; ++side) {
      const double x = side == 0 ? -len / 2.0 : len / 2.0;
      for (int k = 0; k < segments; ++k) {
        const double a = 2.0 * 3.14159265358979323846 * k / segments;
        vertices.push_back({pose * Vec3(x, r * std::cos(a), r * std::sin(a)), rgb});
      }
    }
    for (int k = 0; k < segments; ++k) {
      const int n = (k + 1) % segments;
      faces.push_back({base + k, base + n, base + segments + n, base + segments + k});
    }
    std::vector<int> cap0;
    std::vector<int> cap1;
    for (int k = 0; k < segments; ++k) {
      cap0.push_back(base + segments - 1 - k);
      cap1.push_back(base + segments + k);
    }
    faces.push_back(cap0);
    faces.push_back(cap1);
  }
};

std::array<int, 3> material_color(MaterialClass m) {
  switch (m) {
    case MaterialClass::kMetallic: return {170, 170, 180};
    case MaterialClass::kTransparent: return {200, 220, 240};
    case MaterialClass::kOther: return {200, 120, 60};
  }
  return {200, 120, 60};
}

}  // namespace

std::string scene_ply(const Scene& scene, const std::optional<Pose>& gripper_pose, const GripperConfig& config,
                      const GripperGeometry& geom) {
  Mesh mesh;
  const BinModel& bin = scene.bin;
  Obb floor;
  floor.center = {bin.inner_length / 2.0, bin.inner_width / 2.0, -bin.wall_thickness / 2.0};
  floor.half = {bin.inner_length / 2.0 + bin.wall_thickness, bin.inner_width / 2.0 + bin.wall_thickness,
                bin.wall_thickness / 2.0};
  mesh.add_box(floor, {90, 90, 100});
  for (const auto& w : wall_slabs(bin)) mesh.add_box(w, {120, 120, 130});

  for (const auto& o : scene.objects) {
    if (o.shape == ShapeKind::kBox) {
      mesh.add_box({o.pose.translation(), o.pose.rotation(), o.dims / 2.0}, material_color(o.material));
    } else {
      mesh.add_cylinder(o.pose, o.dims.x(), o.dims.y(), material_color(o.material));
    }
  }
  if (gripper_pose)
    for (const auto& part : gripper_parts(*gripper_pose, config, geom)) mesh.add_box(part, {40, 160, 60});

  std::string out;
  out += "ply\nformat ascii 1.0\ncomment binpick scene export\n";
  out += "element vertex " + std::to_string(mesh.vertices.size()) + "\n";
  out += "property float x\nproperty float y\nproperty float z\n";
  out += "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  out += "element face " + std::to_string(mesh.faces.size()) + "\n";
  out += "property list uchar int vertex_indices\nend_header\n";
  char buf[128];
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "%.6f %.6f %.6f %d %d %d\n", v.p.x(), v.p.y(), v.p.z(), v.rgb[0], v.rgb[1],
                  v.rgb[2]);
    out += buf;
  }
  for (const auto& f : mesh.faces) {
    out += std::to_string(f.size());
    for (int i : f) out += " " + std::to_string(i);
    out += "\n";
  }
  return out;
}

}  // namespace binpick::io
