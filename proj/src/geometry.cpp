#include "binpick/geometry.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace binpick {

namespace {
constexpr double kRotationTol = 1e-9;
constexpr double kMaxDepth = 20.0;
}  // namespace

Pose::Pose(const Mat3& rotation, const Vec3& translation) : rotation_(rotation), translation_(translation) {
  if (!rotation.allFinite() || !translation.allFinite()) throw DomainError("pose contains non-finite values");
  const double ortho = (rotation * rotation.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (ortho > kRotationTol || std::abs(rotation.determinant() - 1.0) > kRotationTol)
    throw DomainError("pose rotation is not a proper rotation matrix");
}

Pose Pose::from_quaternion(double w, double x, double y, double z, const Vec3& t) {
  Eigen::Quaterniond q(w, x, y, z);
  if (!(q.norm() > 0.0) || !std::isfinite(q.norm())) throw DomainError("quaternion has zero or non-finite norm");
  q.normalize();
  return {q.toRotationMatrix(), t};
}

Pose Pose::rot_z(double degrees, const Vec3& t) {
  const double r = deg2rad(degrees);
  Mat3 R;
  R << std::cos(r), -std::sin(r), 0.0, std::sin(r), std::cos(r), 0.0, 0.0, 0.0, 1.0;
  return {R, t};
}

Eigen::Vector4d Pose::quaternion_wxyz() const {
  Eigen::Quaterniond q(rotation_);
  q.normalize();
  if (q.w() < 0.0) q.coeffs() *= -1.0;
  return {q.w(), q.x(), q.y(), q.z()};
}

Pose Pose::operator*(const Pose& other) const {
  Pose out;
  out.rotation_ = rotation_ * other.rotation_;
  out.translation_ = rotation_ * other.translation_ + translation_;
  return out;
}

Pose Pose::inverse() const {
  Pose out;
  out.rotation_ = rotation_.transpose();
  out.translation_ = -(out.rotation_ * translation_);
  return out;
}

bool Pose::is_finite() const { return rotation_.allFinite() && translation_.allFinite(); }

bool Pose::approx(const Pose& other, double tol) const {
  return (rotation_ - other.rotation_).cwiseAbs().maxCoeff() <= tol &&
         (translation_ - other.translation_).cwiseAbs().maxCoeff() <= tol;
}

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) throw DomainError("focal lengths must be positive");
  if (width <= 0 || height <= 0) throw DomainError("image size must be positive");
  if (!(cx >= 0.0 && cx < width && cy >= 0.0 && cy < height))
    throw DomainError("principal point outside the image");
}

DepthImage::DepthImage(int width, int height, float fill)
    : width_(width), height_(height), data_(static_cast<std::size_t>(width) * height, fill) {
  if (width <= 0 || height <= 0) throw DomainError("depth image size must be positive");
}

DepthImage::DepthImage(int width, int height, std::vector<float> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width <= 0 || height <= 0) throw DomainError("depth image size must be positive");
  if (data_.size() != static_cast<std::size_t>(width) * height)
    throw ShapeMismatchError("depth buffer size does not match width*height");
}

bool DepthImage::is_valid_depth(double d) { return std::isfinite(d) && d > 0.0 && d < kMaxDepth; }

Vec3 back_project(const Vec2& u, double depth, const CameraIntrinsics& K) {
  if (!std::isfinite(depth) || depth <= 0.0) throw InvalidDepthError("depth must be finite and positive");
  return {(u.x() - K.cx) * depth / K.fx, (u.y() - K.cy) * depth / K.fy, depth};
}

Vec2 project(const Vec3& p, const CameraIntrinsics& K) {
  if (!(p.z() > 0.0)) throw BehindCameraError("point is behind the camera");
  return {K.fx * p.x() / p.z() + K.cx, K.fy * p.y() / p.z() + K.cy};
}

PlaneFit fit_plane(std::span<const Vec3> points) {
  if (points.size() < 3) throw InsufficientSupportError("plane fit needs at least 3 points");
  Vec3 centroid = Vec3::Zero();
  for (const auto& p : points) centroid += p;
  centroid /= static_cast<double>(points.size());
  Mat3 cov = Mat3::Zero();
  for (const auto& p : points) {
    const Vec3 d = p - centroid;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(points.size());

  Eigen::SelfAdjointEigenSolver<Mat3> solver(cov);
  const auto& values = solver.eigenvalues();  // ascending
  const auto& vectors = solver.eigenvectors();
  const double scale = std::max(values.cwiseAbs().maxCoeff(), 1e-300);

  auto canonical = [](Vec3 v) {
    // first non-zero component positive
    for (int i = 0; i < 3; ++i) {
      if (v[i] != 0.0) {
        if (v[i] < 0.0) v = -v;
        break;
      }
    }
    return v;
  };
  Vec3 best = canonical(vectors.col(0));
  for (int k = 1; k < 3; ++k) {
    if (values[k] - values[0] > 1e-12 * scale) break;
    const Vec3 cand = canonical(vectors.col(k));
    if (std::lexicographical_compare(cand.data(), cand.data() + 3, best.data(), best.data() + 3)) best = cand;
  }
  best.normalize();

  double sq = 0.0;
  for (const auto& p : points) {
    const double d = (p - centroid).dot(best);
    sq += d * d;
  }
  return {centroid, best, std::sqrt(sq / static_cast<double>(points.size())), points.size()};
}

Vec3 estimate_normal(const DepthImage& depth, const Pixel& u, const CameraIntrinsics& K, int window) {
  if (window < 1) throw DomainError("normal window must be positive");
  const int half = window / 2;
  std::vector<Vec3> pts;
  pts.reserve(static_cast<std::size_t>(window) * window);
  for (int y = u.y - half; y <= u.y + half; ++y) {
    for (int x = u.x - half; x <= u.x + half; ++x) {
      if (!depth.contains(x, y) || !depth.valid(x, y)) continue;
      pts.push_back(back_project(Vec2(x, y), depth.at(x, y), K));
    }
  }
  if (pts.size() < 6)
    throw InsufficientSupportError("only " + std::to_string(pts.size()) + " valid depth pixels in normal window");
  Vec3 n = fit_plane(pts).normal;
  if (n.z() > 0.0 || (n.z() == 0.0 && n.dot(pts.front()) > 0.0)) n = -n;
  return n;
}

double wrap_degrees(double deg) {
  double r = std::fmod(deg + 180.0, 360.0);
  if (r < 0.0) r += 360.0;
  return r - 180.0;
}

double fold_degrees(double deg) {
  double r = std::fmod(deg + 90.0, 180.0);
  if (r < 0.0) r += 180.0;
  return r - 90.0;
}

}  // namespace binpick
