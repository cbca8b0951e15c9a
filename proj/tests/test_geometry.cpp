#include <doctest.h>

#include <cmath>

#include "binpick/errors.hpp"
#include "binpick/geometry.hpp"
#include "binpick/rng.hpp"

using namespace binpick;

namespace {

const CameraIntrinsics kK{500.0, 500.0, 320.0, 240.0, 640, 480};

// Depth of the plane n.p = c along the ray through pixel (x, y).
DepthImage plane_depth(const Vec3& n, double c, const CameraIntrinsics& K) {
  DepthImage d(K.width, K.height);
  for (int y = 0; y < K.height; ++y)
    for (int x = 0; x < K.width; ++x) {
      const Vec3 r((x - K.cx) / K.fx, (y - K.cy) / K.fy, 1.0);
      d.at(x, y) = static_cast<float>(c / n.dot(r));
    }
  return d;
}

Pose random_pose(Rng& rng) {
  const double w = rng.normal(0, 1), x = rng.normal(0, 1), y = rng.normal(0, 1), z = rng.normal(0, 1);
  return Pose::from_quaternion(w, x, y, z, Vec3(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)));
}

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("back_project pinhole values") {
    CHECK((back_project(Pixel{320, 240}, 1.0, kK) - Vec3(0, 0, 1)).norm() < 1e-12);
    CHECK((back_project(Pixel{820, 240}, 1.0, kK) - Vec3(1, 0, 1)).norm() < 1e-12);
    // (400-320)*0.8/500 = 0.128, (300-240)*0.8/500 = 0.096
    CHECK((back_project(Pixel{400, 300}, 0.8, kK) - Vec3(0.128, 0.096, 0.8)).norm() < 1e-12);
  }

  TEST_CASE("back_project rejects invalid depth") {
    CHECK_THROWS_AS(back_project(Pixel{1, 1}, 0.0, kK), InvalidDepthError);
    CHECK_THROWS_AS(back_project(Pixel{1, 1}, -1.0, kK), InvalidDepthError);
    CHECK_THROWS_AS(back_project(Pixel{1, 1}, std::nan(""), kK), InvalidDepthError);
  }

  TEST_CASE("project pinhole values") {
    const Vec2 u = project(Vec3(0, 0, 1), kK);
    CHECK(u.x() == doctest::Approx(320));
    CHECK(u.y() == doctest::Approx(240));
    // 320 + 500*0.25/0.5 = 570, 240 - 500*0.1/0.5 = 140
    const Vec2 v = project(Vec3(0.25, -0.1, 0.5), kK);
    CHECK(std::abs(v.x() - 570.0) < 1e-9);
    CHECK(std::abs(v.y() - 140.0) < 1e-9);
    CHECK_THROWS_AS(project(Vec3(0, 0, 0), kK), BehindCameraError);
    CHECK_THROWS_AS(project(Vec3(0, 0, -1), kK), BehindCameraError);
  }

  TEST_CASE("project inverts back_project") {
    Rng rng(11);
    for (int i = 0; i < 2000; ++i) {
      const Vec2 u(rng.uniform(0, 639), rng.uniform(0, 479));
      const double d = rng.uniform(0.05, 19.0);
      CHECK((project(back_project(u, d, kK), kK) - u).norm() < 1e-6);
    }
  }

  TEST_CASE("transform examples") {
    const Vec3 p(1, 1, 1);
    CHECK((transform(Pose::identity(), p) - p).norm() == 0.0);
    CHECK((transform(Pose::translation(Vec3(0, 0, 0.5)), p) - Vec3(1, 1, 1.5)).norm() < 1e-15);
    CHECK((transform(Pose::rot_z(90.0), Vec3(1, 0, 0)) - Vec3(0, 1, 0)).norm() < 1e-9);
  }

  TEST_CASE("pose group laws") {
    Rng rng(5);
    for (int i = 0; i < 500; ++i) {
      const Pose a = random_pose(rng), b = random_pose(rng), c = random_pose(rng);
      CHECK((a * a.inverse()).approx(Pose::identity(), 1e-9));
      CHECK(((a * b) * c).approx(a * (b * c), 1e-9));
      const Vec3 p(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
      CHECK(((a * b) * p - a * (b * p)).norm() < 1e-9);
    }
  }

  TEST_CASE("pose rejects improper rotations") {
    CHECK_THROWS_AS(Pose(Vec3(1, 1, -1).asDiagonal(), Vec3::Zero()), DomainError);
    CHECK_THROWS_AS(Pose(Mat3::Identity() * 1.01, Vec3::Zero()), DomainError);
  }

  TEST_CASE("quaternion round trip") {
    Rng rng(8);
    for (int i = 0; i < 200; ++i) {
      const Pose a = random_pose(rng);
      const Eigen::Vector4d q = a.quaternion_wxyz();
      CHECK(q[0] >= 0.0);
      CHECK(Pose::from_quaternion(q[0], q[1], q[2], q[3], a.translation()).approx(a, 1e-12));
    }
  }

  TEST_CASE("normal of a constant-depth plane") {
    const DepthImage d(640, 480, 1.0f);
    for (Pixel u : {Pixel{320, 240}, Pixel{10, 10}, Pixel{600, 400}})
      CHECK((estimate_normal(d, u, kK) - Vec3(0, 0, -1)).norm() < 1e-6);
  }

  TEST_CASE("normal of a 30 degree ramp") {
    const double s = std::sin(deg2rad(30.0)), c = std::cos(deg2rad(30.0));
    const Vec3 n(0.0, -s, -c);  // tilted about x, facing the camera
    const DepthImage d = plane_depth(n, -1.0, kK);
    for (Pixel u : {Pixel{320, 240}, Pixel{100, 50}, Pixel{500, 400}})
      CHECK((estimate_normal(d, u, kK) - n).norm() < 1e-3);
  }

  TEST_CASE("normal needs six valid pixels") {
    DepthImage d(64, 64, 0.0f);
    const CameraIntrinsics K{50, 50, 32, 32, 64, 64};
    CHECK_THROWS_AS(estimate_normal(d, Pixel{32, 32}, K), InsufficientSupportError);
    for (int i = 0; i < 5; ++i) d.at(30 + i, 32) = 1.0f;
    CHECK_THROWS_AS(estimate_normal(d, Pixel{32, 32}, K), InsufficientSupportError);
    d.at(32, 30) = 1.0f;
    CHECK_NOTHROW(estimate_normal(d, Pixel{32, 32}, K));
  }

  TEST_CASE("depth validity") {
    CHECK(DepthImage::is_valid_depth(0.5));
    CHECK_FALSE(DepthImage::is_valid_depth(0.0));
    CHECK_FALSE(DepthImage::is_valid_depth(20.0));
    CHECK_FALSE(DepthImage::is_valid_depth(INFINITY));
  }

  TEST_CASE("angle wrapping") {
    CHECK(wrap_degrees(180.0) == doctest::Approx(-180.0));
    CHECK(wrap_degrees(-190.0) == doctest::Approx(170.0));
    CHECK(fold_degrees(90.0) == doctest::Approx(-90.0));
    CHECK(fold_degrees(100.0) == doctest::Approx(-80.0));
    CHECK(fold_degrees(-135.0) == doctest::Approx(45.0));
  }

  TEST_CASE("intrinsics validation") {
    CHECK_NOTHROW(kK.validate());
    CHECK_THROWS_AS((CameraIntrinsics{0, 500, 320, 240, 640, 480}.validate()), DomainError);
    CHECK_THROWS_AS((CameraIntrinsics{500, 500, 640, 240, 640, 480}.validate()), DomainError);
  }
}
