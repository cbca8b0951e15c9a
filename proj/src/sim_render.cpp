#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

#include "binpick/rng.hpp"
#include "binpick/sim.hpp"

namespace binpick {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Hit {
  double t = kInf;
  int id = kHitNone;
  Vec3 normal = Vec3::UnitZ();
  Vec3 local = Vec3::Zero();
};

// Slab test against an axis-aligned box centered at the origin.
bool ray_box(const Vec3& o, const Vec3& d, const Vec3& half, double& t_hit, Vec3& n_hit) {
  double t0 = -kInf;
  double t1 = kInf;
  int axis = -1;
  double sign = 1.0;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(d[i]) < 1e-15) {
      if (std::abs(o[i]) > half[i]) return false;
      continue;
    }
    double a = (-half[i] - o[i]) / d[i];
    double b = (half[i] - o[i]) / d[i];
    double s = -1.0;
    if (a > b) {
      std::swap(a, b);
      s = 1.0;
    }
    if (a > t0) {
      t0 = a;
      axis = i;
      sign = s;
    }
    t1 = std::min(t1, b);
    if (t0 > t1) return false;
  }
  if (axis < 0 || t0 <= 0.0) return false;
  t_hit = t0;
  n_hit = Vec3::Zero();
  n_hit[axis] = sign;
  return true;
}

// Cylinder with axis along local x, centered at the origin.
bool ray_cylinder_x(const Vec3& o, const Vec3& d, double r, double len, double& t_hit, Vec3& n_hit) {
  bool found = false;
  double best = kInf;
  const double a = d.y() * d.y() + d.z() * d.z();
  if (a > 1e-15) {
    const double b = 2.0 * (o.y() * d.y() + o.z() * d.z());
    const double c = o.y() * o.y() + o.z() * o.z() - r * r;
    const double disc = b * b - 4.0 * a * c;
    if (disc >= 0.0) {
      const double t = (-b - std::sqrt(disc)) / (2.0 * a);
      const double x = o.x() + t * d.x();
      if (t > 0.0 && std::abs(x) <= len / 2.0) {
        best = t;
        found = true;
        const Vec3 p = o + t * d;
        n_hit = Vec3(0.0, p.y(), p.z()).normalized();
      }
    }
  }
  if (std::abs(d.x()) > 1e-15) {
    for (double side : {-1.0, 1.0}) {
      const double t = (side * len / 2.0 - o.x()) / d.x();
      if (t <= 0.0 || t >= best) continue;
      const Vec3 p = o + t * d;
      if (p.y() * p.y() + p.z() * p.z() <= r * r) {
        best = t;
        found = true;
        n_hit = Vec3(side, 0.0, 0.0);
      }
    }
  }
  if (found) t_hit = best;
  return found;
}

Hit cast(const Scene& scene, const std::vector<Obb>& walls, const Vec3& o, const Vec3& d) {
  Hit best;
  if (d.z() < 0.0) {
    const double t = -o.z() / d.z();
    if (t > 0.0) best = {t, kHitFloor, Vec3::UnitZ(), Vec3::Zero()};
  }
  for (const auto& w : walls) {
    double t = 0.0;
    Vec3 n;
    if (ray_box(o - w.center, d, w.half, t, n) && t < best.t) best = {t, kHitWall, n, Vec3::Zero()};
  }
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    const auto& obj = scene.objects[i];
    const Mat3 Rt = obj.pose.rotation().transpose();
    const Vec3 lo = Rt * (o - obj.pose.translation());
    const Vec3 ld = Rt * d;
    double t = 0.0;
    Vec3 n;
    const bool hit = obj.shape == ShapeKind::kBox ? ray_box(lo, ld, obj.dims / 2.0, t, n)
                                                  : ray_cylinder_x(lo, ld, obj.dims.x(), obj.dims.y(), t, n);
    if (hit && t < best.t) best = {t, static_cast<int>(i), obj.pose.rotation() * n, lo + t * ld};
  }
  return best;
}

std::array<std::uint8_t, 3> palette(int id) {
  static constexpr std::array<std::array<std::uint8_t, 3>, 6> kColors{
      {{200, 40, 40}, {40, 170, 60}, {40, 70, 200}, {220, 180, 30}, {170, 50, 170}, {30, 170, 170}}};
  return kColors[static_cast<std::size_t>(id) % kColors.size()];
}

std::uint64_t pixel_hash(std::uint64_t seed, std::size_t idx) { return mix_seed(seed, idx); }

}  // namespace

RenderBuffers render_scene(const Scene& scene, const Pose& cam, const CameraIntrinsics& K, const RenderOptions& opts) {
  K.validate();
  const int w = K.width;
  const int h = K.height;
  RenderBuffers out;
  out.depth = DepthImage(w, h);
  out.hit.assign(static_cast<std::size_t>(w) * h, kHitNone);
  out.point_bin.assign(out.hit.size(), Vec3::Zero());
  out.normal_bin.assign(out.hit.size(), Vec3::UnitZ());
  out.rgb = RgbImage(w, h);

  const auto walls = wall_slabs(scene.bin);
  const Pose world_from_cam = cam.inverse();
  const Vec3 origin = world_from_cam.translation();
  const Mat3& Rwc = world_from_cam.rotation();

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * w + x;
      const Vec3 dir = Rwc * Vec3((x - K.cx) / K.fx, (y - K.cy) / K.fy, 1.0);
      const Hit hit = cast(scene, walls, origin, dir);
      out.hit[idx] = hit.id;
      if (hit.id == kHitNone) continue;
      const Vec3 p = origin + hit.t * dir;
      out.point_bin[idx] = p;
      out.normal_bin[idx] = hit.normal;
      float depth = static_cast<float>(hit.t);

      std::array<std::uint8_t, 3> color{};
      if (hit.id == kHitFloor) {
        color = {110, 105, 100};
      } else if (hit.id == kHitWall) {
        color = {70, 70, 80};
      } else {
        const auto& obj = scene.objects[static_cast<std::size_t>(hit.id)];
        switch (obj.material) {
          case MaterialClass::kMetallic: {
            // specular checker: grey with strong brightness contrast
            const int cell = static_cast<int>(std::floor(hit.local.x() / 0.006)) +
                             static_cast<int>(std::floor(hit.local.y() / 0.006));
            const std::uint8_t v = (cell & 1) ? 235 : 70;
            color = {v, v, v};
            break;
          }
          case MaterialClass::kTransparent:
            color = {205, 212, 220};
            if (Rng(pixel_hash(opts.noise_seed, idx)).bernoulli(opts.transparent_dropout)) depth = 0.0f;
            break;
          case MaterialClass::kOther: {
            const double shade = 0.7 + 0.3 * std::max(0.0, hit.normal.z());
            const auto base = palette(obj.id);
            for (int c = 0; c < 3; ++c) color[c] = static_cast<std::uint8_t>(std::lround(base[c] * shade));
            break;
          }
        }
      }
      out.depth.at(x, y) = depth;
      for (int c = 0; c < 3; ++c) out.rgb.at(x, y, c) = color[c];
    }
  }
  return out;
}

DepthImage render_depth(const Scene& scene, const Pose& cam, const CameraIntrinsics& K, const RenderOptions& opts) {
  return render_scene(scene, cam, K, opts).depth;
}

namespace {

// Summed-area tables of back-projected point moments for O(1) window plane fits.
class MomentTable {
 public:
  MomentTable(const DepthImage& depth, const CameraIntrinsics& K) : w_(depth.width() + 1), h_(depth.height() + 1) {
    table_.assign(static_cast<std::size_t>(w_) * h_, {});
    for (int y = 0; y < depth.height(); ++y) {
      for (int x = 0; x < depth.width(); ++x) {
        Moments m{};
        if (depth.valid(x, y)) {
          const Vec3 p = back_project(Pixel{x, y}, depth.at(x, y), K);
          m = {1.0, p.x(), p.y(), p.z(), p.x() * p.x(), p.x() * p.y(), p.x() * p.z(), p.y() * p.y(), p.y() * p.z(),
               p.z() * p.z()};
        }
        auto& cell = at(x + 1, y + 1);
        for (int k = 0; k < 10; ++k) cell[k] = m[k] + at(x, y + 1)[k] + at(x + 1, y)[k] - at(x, y)[k];
      }
    }
  }

  /// RMS distance to the best-fit plane over the clipped window, or nullopt with < 6 points.
  std::optional<double> residual(int cx, int cy, int half) const {
    const int x0 = std::max(cx - half, 0);
    const int y0 = std::max(cy - half, 0);
    const int x1 = std::min(cx + half + 1, w_ - 1);
    const int y1 = std::min(cy + half + 1, h_ - 1);
    Moments s{};
    for (int k = 0; k < 10; ++k) s[k] = at(x1, y1)[k] - at(x0, y1)[k] - at(x1, y0)[k] + at(x0, y0)[k];
    const double n = std::round(s[0]);
    if (n < 6.0) return std::nullopt;
    const Vec3 mu(s[1] / n, s[2] / n, s[3] / n);
    Mat3 cov;
    cov(0, 0) = s[4] / n - mu.x() * mu.x();
    cov(0, 1) = cov(1, 0) = s[5] / n - mu.x() * mu.y();
    cov(0, 2) = cov(2, 0) = s[6] / n - mu.x() * mu.z();
    cov(1, 1) = s[7] / n - mu.y() * mu.y();
    cov(1, 2) = cov(2, 1) = s[8] / n - mu.y() * mu.z();
    cov(2, 2) = s[9] / n - mu.z() * mu.z();
    Eigen::SelfAdjointEigenSolver<Mat3> solver(cov, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(solver.eigenvalues()[0], 0.0));
  }

 private:
  using Moments = std::array<double, 10>;
  Moments& at(int x, int y) { return table_[static_cast<std::size_t>(y) * w_ + x]; }
  const Moments& at(int x, int y) const { return table_[static_cast<std::size_t>(y) * w_ + x]; }
  int w_;
  int h_;
  std::vector<Moments> table_;
};

void set3(Tensor3& t, int x, int y, float a, float b, float c) {
  t.at(0, y, x) = a;
  t.at(1, y, x) = b;
  t.at(2, y, x) = c;
}

}  // namespace

AffordanceBundle oracle_affordance(const Scene& scene, const DepthImage& depth, const Pose& cam,
                                   const CameraIntrinsics& K, const OracleParams& params) {
  if (depth.width() != K.width || depth.height() != K.height)
    throw ShapeMismatchError("depth image does not match the intrinsics");
  return oracle_affordance(scene, render_scene(scene, cam, K, RenderOptions{0.0, 0}), depth, K, params);
}

AffordanceBundle oracle_affordance(const Scene& scene, const RenderBuffers& geo, const DepthImage& depth,
                                   const CameraIntrinsics& K, const OracleParams& params) {
  const int w = K.width;
  const int h = K.height;
  if (depth.width() != w || depth.height() != h || geo.hit.size() != static_cast<std::size_t>(w) * h)
    throw ShapeMismatchError("depth image or geometry does not match the intrinsics");
  const MomentTable moments(depth, K);
  const double cup = params.gripper.cup_radius;
  const double L = scene.bin.inner_length;
  const double W = scene.bin.inner_width;

  AffordanceBundle b{Tensor3(3, h, w), Tensor3(3, h, w), Tensor3(kAngleBins, h, w, 1.0f / kAngleBins)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * w + x;
      const int id = geo.hit[idx];
      const Vec3& p = geo.point_bin[idx];
      if (id < 0) {
        const bool band = id == kHitFloor && p.x() >= 0 && p.y() >= 0 && p.x() <= L && p.y() <= W &&
                          std::min({p.x(), L - p.x(), p.y(), W - p.y()}) < cup;
        if (band) set3(b.suction, x, y, 0.05f, 0.9f, 0.05f);
        else set3(b.suction, x, y, 0.05f, 0.05f, 0.9f);
        set3(b.finger, x, y, 0.05f, 0.05f, 0.9f);
        continue;
      }
      const auto& obj = scene.objects[static_cast<std::size_t>(id)];

      bool suction_ok = false;
      double edge = 0.0;
      if (geo.normal_bin[idx].z() >= params.min_top_normal_z) {
        edge = footprint_edge_distance(obj, p);
        if (edge >= cup) {
          const auto res = moments.residual(x, y, params.window / 2);
          suction_ok = res && *res < params.max_plane_residual;
        }
      }
      if (suction_ok) {
        const double s = suction_success_probability(edge, cup);
        set3(b.suction, x, y, static_cast<float>(s), static_cast<float>(0.95 - s), 0.05f);
      } else {
        set3(b.suction, x, y, 0.05f, 0.9f, 0.05f);
      }

      if (const auto f = finger_success_probability(scene, static_cast<std::size_t>(id), p, params.gripper)) {
        set3(b.finger, x, y, static_cast<float>(*f), static_cast<float>(0.95 - *f), 0.05f);
      } else {
        set3(b.finger, x, y, 0.05f, 0.9f, 0.05f);
      }

      const int bin = angle_bin(grip_angle(obj));
      for (int c = 0; c < kAngleBins; ++c) b.angle.at(c, y, x) = c == bin ? 1.0f : 0.0f;
    }
  }
  return b;
}

}  // namespace binpick
