#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "binpick/bin_model.hpp"
#include "binpick/collision.hpp"
#include "binpick/gripper.hpp"
#include "binpick/io.hpp"
#include "binpick/labelxfer.hpp"
#include "binpick/sim.hpp"

namespace binpick::io {

using Json = nlohmann::json;

/// Pretty-printed, sorted keys, trailing newline.
std::string dump(const Json& j);
/// Throws FormatError with the parser message.
Json parse_json(const std::string& text, const std::string& what);

// Poses are written with both the quaternion (w, x, y, z) and the row-major
// rotation matrix; readers prefer the matrix when present. "convention" names
// the mapping (e.g. "world_to_camera", "ee_to_camera"); "camera_to_world" is
// inverted on read so camera poses always load as world-to-camera.
Json to_json(const Pose& p, std::string_view convention = "world_to_camera");
Pose pose_from_json(const Json& j);

Json to_json(const CameraIntrinsics& K);
CameraIntrinsics intrinsics_from_json(const Json& j);

Json to_json(const BinModel& bin);
BinModel bin_from_json(const Json& j);

Json to_json(const GripperGeometry& g);
GripperGeometry gripper_from_json(const Json& j);

Json to_json(const SceneSpec& s);
SceneSpec scene_spec_from_json(const Json& j);

Json to_json(const Scene& scene);
Scene scene_from_json(const Json& j);

Json to_json(const GripperConfig& c);
GripperConfig config_from_json(const Json& j);

struct Provenance {
  std::map<std::string, std::string> input_hashes;
  double eps_s = kDefaultSuctionThreshold;
  bool avoidance = true;
  bool greedy = false;
};

struct PlanDocument {
  GraspPlan plan;
  GraspSelection selection;
  std::string region;
  Provenance provenance;
  std::string version{kToolVersion};
};

Json to_json(const GraspPlan& plan);
GraspPlan plan_from_json(const Json& j);
Json to_json(const PlanDocument& doc);
PlanDocument plan_document_from_json(const Json& j);

/// Scenario file for the simulator. Every field is optional in the file.
struct Scenario {
  BinModel bin;
  SceneSpec scene;
  double camera_height = 0.9;
  int image_width = 320;
  int image_height = 240;
  double focal = 400.0;
  GripperGeometry gripper;
  HoldModel hold;
  PolicyFlags policy;
  EpisodeLimits limits;
  double lift_accel = 5.0;
  double transparent_dropout = 0.7;
  std::uint64_t seed = 0;

  SimParams sim_params() const;
};

Scenario scenario_from_json(const Json& j);
Json to_json(const Scenario& s);

Json to_json(const EpisodeReport& r);

struct AggregateReport {
  std::vector<EpisodeReport> episodes;
  std::vector<std::uint64_t> seeds;
  double mean_success_rate = 0.0;
  double mean_clear_rate = 0.0;
  std::array<double, 5> histogram_percent{};
  std::array<int, 5> histogram_total{};
  int collision_events = 0;
};

AggregateReport aggregate(std::vector<EpisodeReport> episodes, std::vector<std::uint64_t> seeds);
Json to_json(const AggregateReport& a, const Scenario& scenario, const PolicyFlags& flags);

Json to_json(const TransferReport& r);

}  // namespace binpick::io
