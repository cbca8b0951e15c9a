#pragma once

// Camera and pose conventions used throughout the library:
//  * Camera frame: x right, y down, z forward. Pixel (0,0) is the top-left
//    pixel and integer pixel coordinates address pixel centers.
//  * A camera pose T^c is world-to-camera: it maps world points into the
//    camera frame. Relative transfer from camera 0 to camera i is
//    T^{c_i} * inverse(T^{c_0}).
//  * A bin pose T_b^c maps bin-frame points into the camera frame.

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstdint>
#include <span>
#include <vector>

#include "binpick/errors.hpp"

namespace binpick {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Integer pixel address; x is the column, y the row.
struct Pixel {
  int x = 0;
  int y = 0;
  friend bool operator==(const Pixel&, const Pixel&) = default;
};

/// Rigid transform in SE(3).
class Pose {
 public:
  Pose() : rotation_(Mat3::Identity()), translation_(Vec3::Zero()) {}

  /// Throws DomainError when `rotation` is not a proper rotation (1e-9).
  Pose(const Mat3& rotation, const Vec3& translation);

  static Pose identity() { return {}; }
  static Pose translation(const Vec3& t) { return {Mat3::Identity(), t}; }
  /// Unit quaternion in (w, x, y, z) order; normalized before use.
  static Pose from_quaternion(double w, double x, double y, double z, const Vec3& t);
  static Pose rot_z(double degrees, const Vec3& t = Vec3::Zero());

  const Mat3& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }
  /// Quaternion (w, x, y, z) with w >= 0.
  Eigen::Vector4d quaternion_wxyz() const;

  Vec3 operator*(const Vec3& p) const { return rotation_ * p + translation_; }
  Pose operator*(const Pose& other) const;
  Pose inverse() const;

  bool is_finite() const;
  bool approx(const Pose& other, double tol) const;

 private:
  Mat3 rotation_;
  Vec3 translation_;
};

/// R*p + t.
inline Vec3 transform(const Pose& pose, const Vec3& p) { return pose * p; }

struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  /// Throws DomainError when focal lengths or principal point are invalid.
  void validate() const;
  bool contains(const Pixel& u) const { return u.x >= 0 && u.y >= 0 && u.x < width && u.y < height; }
};

/// Row-major H x W depth field in meters. 0 or non-finite means invalid.
class DepthImage {
 public:
  DepthImage() = default;
  DepthImage(int width, int height, float fill = 0.0f);
  DepthImage(int width, int height, std::vector<float> data);

  int width() const { return width_; }
  int height() const { return height_; }
  float at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  float& at(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  bool valid(int x, int y) const { return is_valid_depth(at(x, y)); }
  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }
  std::span<const float> data() const { return data_; }
  std::span<float> data() { return data_; }

  static bool is_valid_depth(double d);

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<float> data_;
};

enum class PointLabel : std::uint8_t { kBackground = 0, kSuccess = 1, kFailure = 2, kUnlabeled = 255 };

struct LabeledPoint {
  Vec3 position;
  PointLabel label = PointLabel::kBackground;
};

using LabeledPointCloud = std::vector<LabeledPoint>;

/// Pixel plus depth to a camera-frame point. Throws InvalidDepthError.
Vec3 back_project(const Vec2& u, double depth, const CameraIntrinsics& K);
inline Vec3 back_project(const Pixel& u, double depth, const CameraIntrinsics& K) {
  return back_project(Vec2(u.x, u.y), depth, K);
}

/// Camera-frame point to a real-valued pixel. Throws BehindCameraError.
Vec2 project(const Vec3& p, const CameraIntrinsics& K);

/// Least-squares plane normal over a `window` x `window` neighbourhood of `u`,
/// oriented toward the camera (n.z < 0). Throws InsufficientSupportError when
/// fewer than 6 valid depth pixels fall inside the window.
Vec3 estimate_normal(const DepthImage& depth, const Pixel& u, const CameraIntrinsics& K, int window = 11);

struct PlaneFit {
  Vec3 centroid;
  Vec3 normal;        // unit, unoriented
  double rms = 0.0;   // point-to-plane RMS distance
  std::size_t count = 0;
};

/// Covariance eigen-decomposition plane fit. Ties in the smallest eigenvalue
/// are broken by lexicographic order of the sign-normalized eigenvectors.
/// Throws InsufficientSupportError when fewer than 3 points are given.
PlaneFit fit_plane(std::span<const Vec3> points);

/// Wraps degrees into [-180, 180).
double wrap_degrees(double deg);
/// Folds degrees into [-90, 90) (pi-periodic angles).
double fold_degrees(double deg);
inline double deg2rad(double d) { return d * 3.14159265358979323846 / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / 3.14159265358979323846; }

}  // namespace binpick
