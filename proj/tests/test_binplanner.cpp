#include <doctest.h>

#include <cmath>

#include "binpick/binplanner.hpp"
#include "binpick/rng.hpp"
#include "binpick/sim.hpp"

using namespace binpick;

namespace {

// Camera 0.9 m above the bin center looking down.
BinModel test_bin(double margin = 0.05) {
  BinModel b;
  b.inner_length = 0.40;
  b.inner_width = 0.30;
  b.margin = margin;
  const Mat3 R = Vec3(1, -1, -1).asDiagonal();
  b.pose_cam_from_bin = Pose(R, -(R * Vec3(0.20, 0.15, 0.9)));
  return b;
}

Vec3 cam(const BinModel& b, double x, double y, double z = 0.0) { return b.pose_cam_from_bin * Vec3(x, y, z); }
Vec3 cam_dir(const BinModel& b, const Vec3& v) { return b.pose_cam_from_bin.rotation() * v.normalized(); }

}  // namespace

TEST_SUITE("binplanner") {
  TEST_CASE("region examples") {
    const BinModel b = test_bin();
    CHECK(classify_region(cam(b, 0.20, 0.15), b) == RegionTag::interior());
    CHECK(classify_region(cam(b, 0.02, 0.15), b) == RegionTag::edge(Side::kNegX));
    CHECK(classify_region(cam(b, 0.02, 0.02), b) == RegionTag::corner(Side::kNegX, Side::kNegY));
    CHECK(classify_region(cam(b, 0.39, 0.29), b) == RegionTag::corner(Side::kPosX, Side::kPosY));
    CHECK(classify_region(cam(b, 0.20, 0.28), b) == RegionTag::edge(Side::kPosY));
    // exactly on the boundary is interior
    CHECK(classify_region_bin(Vec3(0.05, 0.15, 0), b) == RegionTag::interior());
    CHECK_THROWS_AS(classify_region(cam(b, -0.01, 0.15), b), OutOfBinError);
    CHECK_THROWS_AS(classify_region(cam(b, 0.2, 0.31), b), OutOfBinError);
  }

  TEST_CASE("region partition matches wall distances") {
    const BinModel b = test_bin();
    Rng rng(17);
    for (int i = 0; i < 2000; ++i) {
      const Vec3 p(rng.uniform(0, 0.4), rng.uniform(0, 0.3), 0);
      const int near = (std::min(p.x(), 0.4 - p.x()) < 0.05) + (std::min(p.y(), 0.3 - p.y()) < 0.05);
      const RegionTag r = classify_region_bin(p, b);
      CHECK(static_cast<int>(r.kind) == near);
    }
  }

  TEST_CASE("safe angles") {
    const BinModel b = test_bin();
    CHECK(safe_angle(RegionTag::edge(Side::kNegX), b) == doctest::Approx(-90.0));
    CHECK(safe_angle(RegionTag::edge(Side::kPosY), b) == doctest::Approx(0.0));
    CHECK(safe_angle(RegionTag::edge(Side::kPosX), b) == doctest::Approx(90.0));
    CHECK(safe_angle(RegionTag::edge(Side::kNegY), b) == doctest::Approx(-180.0));
    CHECK(safe_angle(RegionTag::corner(Side::kNegX, Side::kNegY), b) == doctest::Approx(-135.0));
    CHECK_THROWS_AS(safe_angle(RegionTag::interior(), b), InteriorRegionError);
  }

  TEST_CASE("flat side faces the wall") {
    const BinModel b = test_bin();
    for (Side x : {Side::kNegX, Side::kPosX})
      for (Side y : {Side::kNegY, Side::kPosY})
        for (const RegionTag& r : {RegionTag::edge(x), RegionTag::edge(y), RegionTag::corner(x, y)}) {
          const double phi = deg2rad(safe_angle(r, b));
          // flat side of top_down_rotation(phi) is R * +y
          const Vec3 flat = top_down_rotation(rad2deg(phi)) * Vec3::UnitY();
          CHECK(flat.dot(r.outward_direction()) >= std::cos(1e-6));
        }
  }

  TEST_CASE("normal_faces_wall") {
    const BinModel b = test_bin();
    const RegionTag e = RegionTag::edge(Side::kNegX);
    const Vec3 up = cam_dir(b, Vec3(0, 0, 1));
    CHECK_FALSE(normal_faces_wall(up, e, b, 30.0));
    CHECK_FALSE(normal_faces_wall(up, RegionTag::corner(Side::kPosX, Side::kPosY), b, 30.0));
    CHECK(normal_faces_wall(cam_dir(b, Vec3(-1, 0, 1)), e, b, 30.0));
    CHECK_FALSE(normal_faces_wall(cam_dir(b, Vec3(1, 0, 1)), e, b, 30.0));
    // 20 degree tilt stays inside the 30 degree cone
    CHECK_FALSE(normal_faces_wall(cam_dir(b, Vec3(-std::sin(deg2rad(20)), 0, std::cos(deg2rad(20)))), e, b, 30.0));
  }

  TEST_CASE("refine_suction") {
    const BinModel b = test_bin();
    const Vec3 tilted = cam_dir(b, Vec3(-1, 0, 1));
    const RefinedGrasp in = refine_suction(cam(b, 0.2, 0.15), tilted, 15.0, b);
    CHECK(in.config == configs::kSuctionApproach);
    CHECK(in.mode == PlanMode::kSuction);
    CHECK(in.angle_deg == 15.0);

    const RefinedGrasp wall = refine_suction(cam(b, 0.02, 0.15), tilted, 15.0, b);
    CHECK(wall.config == configs::kSuctionSafe);
    CHECK(wall.mode == PlanMode::kSuctionCa);
    CHECK(wall.angle_deg == doctest::Approx(-90.0));
    // approach axis points straight down
    CHECK((wall.pose_in_bin.rotation() * Vec3::UnitZ() - Vec3(0, 0, -1)).norm() < 1e-12);
    CHECK((wall.pose_in_bin.translation() - Vec3(0.02, 0.15, 0)).norm() < 1e-9);

    const RefinedGrasp upward = refine_suction(cam(b, 0.02, 0.15), cam_dir(b, Vec3(0, 0, 1)), 15.0, b);
    CHECK(upward.mode == PlanMode::kSuction);
    CHECK(upward.config == configs::kSuctionApproach);
  }

  TEST_CASE("refine_suction is idempotent on pose and angle") {
    const BinModel b = test_bin();
    Rng rng(4);
    for (int i = 0; i < 300; ++i) {
      const Vec3 p = cam(b, rng.uniform(0, 0.4), rng.uniform(0, 0.3));
      const Vec3 n = cam_dir(b, Vec3(rng.normal(0, 1), rng.normal(0, 1), 1.0));
      const RefinedGrasp g = refine_suction(p, n, rng.uniform(-90, 90), b);
      if (g.mode != PlanMode::kSuctionCa) continue;
      const Vec3 vertical = g.pose.rotation() * Vec3(0, 0, -1);
      const RefinedGrasp again = refine_suction(p, vertical, g.angle_deg, b);
      CHECK(again.pose.approx(g.pose, 1e-9));
      CHECK(again.angle_deg == doctest::Approx(g.angle_deg));
    }
  }

  TEST_CASE("interior finger grasp needs no push") {
    const BinModel b = test_bin();
    const FingerRefinement r = refine_finger(cam(b, 0.2, 0.15), 30.0, b);
    REQUIRE(std::holds_alternative<RefinedGrasp>(r));
    const auto& g = std::get<RefinedGrasp>(r);
    CHECK(g.config == configs::kFingerClosed);
    CHECK(g.mode == PlanMode::kFinger);
  }

  TEST_CASE("corner finger grasp pushes to the interior") {
    const BinModel b = test_bin(0.05);
    PlannerParams params;
    params.push_clearance = 0.03;
    const FingerRefinement r = refine_finger(cam(b, 0.02, 0.02), 0.0, b, params);
    REQUIRE(std::holds_alternative<PushRequest>(r));
    const auto& req = std::get<PushRequest>(r);
    // direction toward the center (0.2, 0.15): (0.18, 0.13) normalized
    const Vec3 dir = Vec3(0.18, 0.13, 0).normalized();
    CHECK((req.direction_bin - dir).norm() < 1e-12);
    // y leaves the band last: (0.05 - 0.02) / dir.y, plus the clearance
    const double expected = 0.03 / dir.y() + 0.03;
    CHECK(req.distance == doctest::Approx(expected).epsilon(1e-12));
    CHECK(req.push.config == configs::kSuctionSafe);
    CHECK(req.push.angle_deg == doctest::Approx(-135.0));
    const Vec3 q = Vec3(0.02, 0.02, 0) + expected * dir;
    CHECK(classify_region_bin(q, b) == RegionTag::interior());
    CHECK((req.regrasp.pose_in_bin.translation() - q).norm() < 1e-9);
    CHECK(validate_plan(make_plan(req, b)));
  }

  TEST_CASE("push distance is capped at the center") {
    BinModel b = test_bin(0.05);
    const Vec3 p(0.03, 0.15, 0);
    CHECK(push_distance(p, Vec3(1, 0, 0), b, 0.5) == doctest::Approx(0.17));
  }

  TEST_CASE("push soundness on random bins") {
    Rng rng(23);
    for (int i = 0; i < 2000; ++i) {
      BinModel b = test_bin();
      b.inner_length = rng.uniform(0.2, 0.8);
      b.inner_width = rng.uniform(0.2, 0.8);
      const double half = std::min(b.inner_length, b.inner_width) / 2.0;
      b.margin = rng.uniform(0.01, 0.6 * half);
      const double clearance = rng.uniform(0.001, half - b.margin - 1e-4);
      const Vec3 p(rng.uniform(0, b.inner_length), rng.uniform(0, b.inner_width), 0);
      if (classify_region_bin(p, b).is_interior()) continue;
      const Vec3 dir = Vec3(b.inner_length / 2 - p.x(), b.inner_width / 2 - p.y(), 0).normalized();
      const Vec3 q = p + push_distance(p, dir, b, clearance) * dir;
      CHECK(classify_region_bin(q, b).is_interior());
    }
  }

  TEST_CASE("gripper collision near a wall") {
    Scene scene;
    scene.bin = test_bin();
    const Pose at_center(top_down_rotation(0.0), Vec3(0.2, 0.15, 0.0));
    for (const GripperConfig& c : {configs::kSuctionApproach, configs::kSuctionSafe, configs::kFingerApproach})
      CHECK_FALSE(check_gripper_collision(at_center, c, 0.0, scene));

    GripperGeometry geom;
    geom.finger_reach = 0.04;
    geom.cup_radius = 0.009;  // a 15 mm cup cannot sit 1 cm from a wall
    // fingers close along x at phi = 0, so the open finger reaches into the -x wall
    const Pose near_wall(top_down_rotation(0.0), Vec3(0.01, 0.15, 0.0));
    CHECK(check_gripper_collision(near_wall, configs::kFingerApproach, 0.0, scene, geom));
    CHECK(check_gripper_collision(near_wall, configs::kSuctionApproach, 0.0, scene, geom));
    const double phi = safe_angle(RegionTag::edge(Side::kNegX), scene.bin);
    CHECK_FALSE(check_gripper_collision(near_wall, configs::kSuctionSafe, phi, scene, geom));

    const Pose two_cm(top_down_rotation(0.0), Vec3(0.02, 0.15, 0.0));
    CHECK(check_gripper_collision(two_cm, configs::kFingerApproach, 0.0, scene));
    CHECK_FALSE(check_gripper_collision(two_cm, configs::kSuctionSafe, phi, scene));
  }

  TEST_CASE("avoid_suction clears the walls away from the very edge") {
    const BinModel b = test_bin();
    Rng rng(31);
    for (int i = 0; i < 1000; ++i) {
      const Vec3 p = cam(b, rng.uniform(0.016, 0.384), rng.uniform(0.016, 0.284), rng.uniform(0, 0.1));
      const Vec3 n = cam_dir(b, Vec3(rng.normal(0, 0.5), rng.normal(0, 0.5), 1.0));
      const RefinedGrasp g = avoid_suction(p, n, rng.uniform(-90, 90), b);
      // the body cannot fit deep into a corner at any yaw; episodes reselect there
      if (g.region.kind == RegionTag::Kind::kEdge) {
        CHECK_FALSE(grasp_hits_walls(g, b, GripperGeometry{}));
      }
    }
  }
}
