#pragma once

#include <array>
#include <vector>

#include "binpick/geometry.hpp"
#include "binpick/image.hpp"

namespace binpick {

struct LabeledView {
  RgbImage rgb;
  DepthImage depth;
  Pose cam_pose;       // world -> camera
  LabelImage labels;   // values: 0 background, 1 success, 2 failure, 255 unlabeled
};

/// View 0 is the labeled representative; the rest receive transferred labels.
struct SceneCapture {
  std::vector<LabeledView> views;
  CameraIntrinsics intrinsics;

  /// Throws ShapeMismatchError / DomainError when views disagree on size or
  /// carry labels outside the enumerated set.
  void validate() const;
};

bool is_known_label(std::uint8_t v);

struct TransferOptions {
  double occlusion_tol = 0.005;   // meters
  bool keep_unlabeled = false;    // untouched pixels stay 255 instead of background
};

struct ViewTransferStats {
  std::size_t projected = 0;     // landed inside the frame in front of the camera
  std::size_t occluded = 0;      // in frame but failed the depth-consistency test
  std::size_t out_of_frame = 0;  // outside the image or behind the camera
  std::size_t written = 0;       // pixels that received a transferred label
  std::array<std::size_t, 4> labeled{};  // final pixel counts: background, success, failure, unlabeled

  friend bool operator==(const ViewTransferStats&, const ViewTransferStats&) = default;
};

struct TransferReport {
  std::vector<ViewTransferStats> views;  // index-aligned with SceneCapture::views; entry 0 is the source
};

/// One point per pixel with valid depth and a label other than unlabeled,
/// expressed in the view's camera frame.
LabeledPointCloud lift_labels(const LabeledView& view, const CameraIntrinsics& K);

/// Relative transform taking camera-0 points into camera i.
inline Pose relative_pose(const Pose& cam0, const Pose& cami) { return cami * cam0.inverse(); }

/// Labels every view i >= 1 from view 0: transform by T^{c_i} (T^{c_0})^{-1},
/// round to the nearest pixel, keep points whose depth agrees with view i
/// within the tolerance; the nearest point wins a pixel.
SceneCapture transfer_labels(const SceneCapture& scene, const TransferOptions& opts = {},
                             TransferReport* report = nullptr);

/// Per-view statistics of the transfer `transfer_labels` would perform.
TransferReport transfer_report(const SceneCapture& scene, const TransferOptions& opts = {});

}  // namespace binpick
