#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "binpick/geometry.hpp"

namespace binpick {

enum class SuctionState : std::uint8_t { kOut, kIn };
enum class Aperture : std::uint8_t { kOpen, kClose };
enum class FingerRotation : std::uint8_t { kDefault, kRotated };

/// Gripper configuration (suction joint, finger aperture, finger rotation).
struct GripperConfig {
  SuctionState suction = SuctionState::kIn;
  Aperture aperture = Aperture::kOpen;
  FingerRotation rotation = FingerRotation::kDefault;
  friend bool operator==(const GripperConfig&, const GripperConfig&) = default;
};

/// Printable form, e.g. "(s_out, f_open, f_dft)".
std::string to_string(const GripperConfig& c);

namespace configs {
inline constexpr GripperConfig kSuctionApproach{SuctionState::kOut, Aperture::kOpen, FingerRotation::kDefault};
inline constexpr GripperConfig kSuctionSafe{SuctionState::kOut, Aperture::kOpen, FingerRotation::kRotated};
inline constexpr GripperConfig kFingerApproach{SuctionState::kIn, Aperture::kOpen, FingerRotation::kDefault};
inline constexpr GripperConfig kFingerClosed{SuctionState::kIn, Aperture::kClose, FingerRotation::kDefault};
}  // namespace configs

namespace step {
struct MoveTo { Pose pose; };
struct SetConfig { GripperConfig config; };
struct SuctionOn {};
struct SuctionOff {};
struct CloseFingers {};
struct OpenFingers {};
struct Push { Vec3 direction; double distance = 0.0; };
struct MagnetOn {};
struct MagnetOff {};
struct Lift { double height = 0.0; };
}  // namespace step

using PrimitiveStep = std::variant<step::MoveTo, step::SetConfig, step::SuctionOn, step::SuctionOff,
                                   step::CloseFingers, step::OpenFingers, step::Push, step::MagnetOn,
                                   step::MagnetOff, step::Lift>;

/// Lowercase kind name used in serialized plans ("move_to", "set_config", ...).
std::string_view step_kind(const PrimitiveStep& s);

enum class PlanMode : std::uint8_t { kSuction, kSuctionCa, kFinger, kPushThenFinger, kFusion, kMagnetic };

std::string_view to_string(PlanMode m);
std::optional<PlanMode> plan_mode_from_string(std::string_view s);

struct GraspPlan {
  std::vector<PrimitiveStep> steps;
  PlanMode mode = PlanMode::kSuction;
  bool expected_collision_free = true;
  // Set for transparent targets: slow motion, lift only after the seal event.
  bool reduced_speed = false;
  bool requires_seal_confirmation = false;
};

inline constexpr double kDefaultLiftHeight = 0.20;

/// True iff the gripper can move `from` -> `to` in one step.
bool validate_transition(const GripperConfig& from, const GripperConfig& to);

/// Replays the plan's configuration changes and checks every transition plus the
/// step invariants (first step sets a config, finite poses, positive distances).
bool validate_plan(const GraspPlan& plan);
/// Configurations visited by the plan, in order.
std::vector<GripperConfig> config_trace(const GraspPlan& plan);

/// Suction attach, retract the cup into the fingers, close, lift.
GraspPlan fusion_sequence(const Pose& grasp_pose, double lift_height = kDefaultLiftHeight);

/// Pick up the electromagnetic holder with the cup, carry it to the target,
/// energize, lift, release at the drop-off and return the holder.
/// `approach` is the configuration used to carry the holder to the target.
GraspPlan magnetic_sequence(const Pose& holder_pose, const Pose& target_pose, const Pose& dropoff_pose,
                            double lift_height = kDefaultLiftHeight,
                            const GripperConfig& approach = configs::kSuctionApproach);

GraspPlan suction_sequence(const Pose& grasp_pose, const GripperConfig& config, PlanMode mode,
                           double lift_height = kDefaultLiftHeight);
GraspPlan finger_sequence(const Pose& grasp_pose, double lift_height = kDefaultLiftHeight);

inline constexpr double kGravity = 9.81;

/// mass * (accel + g) <= hold_force. Throws DomainError on invalid inputs.
bool suction_hold_check(double mass, double accel, double hold_force);
/// finger_span_closed <= object_width <= finger_span_open (inclusive).
bool fusion_hold_check(double object_width, double finger_span_closed, double finger_span_open);

/// Holding capability of the gripper; defaults stand in for unpublished hardware numbers.
struct HoldModel {
  double suction_force = 15.0;     // N
  double finger_span_closed = 0.01;
  double finger_span_open = 0.10;
  double magnet_force = 20.0;      // N

  bool suction_holds(double mass, double accel) const { return suction_hold_check(mass, accel, suction_force); }
  /// Fingers close on the object; the suction seal still contributes.
  bool fusion_holds(double mass, double accel, double width) const {
    return fusion_hold_check(width, finger_span_closed, finger_span_open) || suction_holds(mass, accel);
  }
};

}  // namespace binpick
