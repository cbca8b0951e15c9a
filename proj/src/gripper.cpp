#include "binpick/gripper.hpp"

#include <cmath>

namespace binpick {

std::string to_string(const GripperConfig& c) {
  std::string s = "(";
  s += c.suction == SuctionState::kOut ? "s_out" : "s_in";
  s += c.aperture == Aperture::kOpen ? ", f_open" : ", f_close";
  s += c.rotation == FingerRotation::kDefault ? ", f_dft)" : ", f_rot)";
  return s;
}

std::string_view step_kind(const PrimitiveStep& s) {
  struct Visitor {
    std::string_view operator()(const step::MoveTo&) const { return "move_to"; }
    std::string_view operator()(const step::SetConfig&) const { return "set_config"; }
    std::string_view operator()(const step::SuctionOn&) const { return "suction_on"; }
    std::string_view operator()(const step::SuctionOff&) const { return "suction_off"; }
    std::string_view operator()(const step::CloseFingers&) const { return "close_fingers"; }
    std::string_view operator()(const step::OpenFingers&) const { return "open_fingers"; }
    std::string_view operator()(const step::Push&) const { return "push"; }
    std::string_view operator()(const step::MagnetOn&) const { return "magnet_on"; }
    std::string_view operator()(const step::MagnetOff&) const { return "magnet_off"; }
    std::string_view operator()(const step::Lift&) const { return "lift"; }
  };
  return std::visit(Visitor{}, s);
}

std::string_view to_string(PlanMode m) {
  switch (m) {
    case PlanMode::kSuction: return "suction";
    case PlanMode::kSuctionCa: return "suction_ca";
    case PlanMode::kFinger: return "finger";
    case PlanMode::kPushThenFinger: return "push_then_finger";
    case PlanMode::kFusion: return "fusion";
    case PlanMode::kMagnetic: return "magnetic";
  }
  return "suction";
}

std::optional<PlanMode> plan_mode_from_string(std::string_view s) {
  for (auto m : {PlanMode::kSuction, PlanMode::kSuctionCa, PlanMode::kFinger, PlanMode::kPushThenFinger,
                 PlanMode::kFusion, PlanMode::kMagnetic})
    if (to_string(m) == s) return m;
  return std::nullopt;
}

bool validate_transition(const GripperConfig& from, const GripperConfig& to) {
  const bool ds = from.suction != to.suction;
  const bool da = from.aperture != to.aperture;
  const bool dr = from.rotation != to.rotation;
  const int changed = int(ds) + int(da) + int(dr);
  if (changed == 0) return true;
  if (changed == 1) return !dr || from.aperture == Aperture::kOpen;
  // cup retraction while the fingers close (grasp fusion)
  return changed == 2 && ds && da;
}

std::vector<GripperConfig> config_trace(const GraspPlan& plan) {
  std::vector<GripperConfig> trace;
  for (const auto& s : plan.steps) {
    if (const auto* sc = std::get_if<step::SetConfig>(&s)) {
      trace.push_back(sc->config);
    } else if (!trace.empty() && std::holds_alternative<step::CloseFingers>(s)) {
      auto c = trace.back();
      c.aperture = Aperture::kClose;
      trace.push_back(c);
    } else if (!trace.empty() && std::holds_alternative<step::OpenFingers>(s)) {
      auto c = trace.back();
      c.aperture = Aperture::kOpen;
      trace.push_back(c);
    }
  }
  return trace;
}

bool validate_plan(const GraspPlan& plan) {
  if (plan.steps.empty() || !std::holds_alternative<step::SetConfig>(plan.steps.front())) return false;
  for (const auto& s : plan.steps) {
    if (const auto* m = std::get_if<step::MoveTo>(&s); m && !m->pose.is_finite()) return false;
    if (const auto* p = std::get_if<step::Push>(&s)) {
      if (!(p->distance > 0.0) || std::abs(p->direction.norm() - 1.0) > 1e-6) return false;
    }
    if (const auto* l = std::get_if<step::Lift>(&s); l && !(l->height > 0.0)) return false;
  }
  const auto trace = config_trace(plan);
  for (std::size_t i = 1; i < trace.size(); ++i)
    if (!validate_transition(trace[i - 1], trace[i])) return false;
  return true;
}

GraspPlan fusion_sequence(const Pose& grasp_pose, double lift_height) {
  GraspPlan plan;
  plan.mode = PlanMode::kFusion;
  plan.steps = {step::SetConfig{configs::kSuctionApproach}, step::MoveTo{grasp_pose}, step::SuctionOn{},
                step::SetConfig{configs::kFingerClosed}, step::Lift{lift_height}};
  return plan;
}

GraspPlan magnetic_sequence(const Pose& holder_pose, const Pose& target_pose, const Pose& dropoff_pose,
                            double lift_height, const GripperConfig& approach) {
  GraspPlan plan;
  plan.mode = PlanMode::kMagnetic;
  plan.steps = {step::SetConfig{approach},
                step::MoveTo{holder_pose},
                step::SuctionOn{},
                step::MoveTo{target_pose},
                step::MagnetOn{},
                step::Lift{lift_height},
                step::MoveTo{dropoff_pose},
                step::MagnetOff{},
                step::MoveTo{holder_pose},
                step::SuctionOff{}};
  return plan;
}

GraspPlan suction_sequence(const Pose& grasp_pose, const GripperConfig& config, PlanMode mode,
                           double lift_height) {
  GraspPlan plan;
  plan.mode = mode;
  plan.steps = {step::SetConfig{config}, step::MoveTo{grasp_pose}, step::SuctionOn{}, step::Lift{lift_height}};
  return plan;
}

GraspPlan finger_sequence(const Pose& grasp_pose, double lift_height) {
  GraspPlan plan;
  plan.mode = PlanMode::kFinger;
  plan.steps = {step::SetConfig{configs::kFingerApproach}, step::MoveTo{grasp_pose}, step::CloseFingers{},
                step::Lift{lift_height}};
  return plan;
}

bool suction_hold_check(double mass, double accel, double hold_force) {
  if (!(mass > 0.0) || !(hold_force > 0.0)) throw DomainError("mass and hold force must be positive");
  if (!(accel >= 0.0)) throw DomainError("acceleration must be non-negative");
  return mass * (accel + kGravity) <= hold_force;
}

bool fusion_hold_check(double object_width, double finger_span_closed, double finger_span_open) {
  if (!(finger_span_closed > 0.0) || !(finger_span_closed < finger_span_open))
    throw DomainError("finger spans must satisfy 0 < closed < open");
  return finger_span_closed <= object_width && object_width <= finger_span_open;
}

}  // namespace binpick
