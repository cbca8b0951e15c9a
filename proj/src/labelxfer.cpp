#include "binpick/labelxfer.hpp"

#include <cmath>
#include <limits>

namespace binpick {

bool is_known_label(std::uint8_t v) { return v <= 2 || v == 255; }

void SceneCapture::validate() const {
  intrinsics.validate();
  if (views.empty()) throw DomainError("scene has no views");
  for (std::size_t i = 0; i < views.size(); ++i) {
    const auto& v = views[i];
    if (v.depth.width() != intrinsics.width || v.depth.height() != intrinsics.height)
      throw ShapeMismatchError("view " + std::to_string(i) + ": depth size differs from intrinsics");
    if (!v.rgb.data.empty() && (v.rgb.width != intrinsics.width || v.rgb.height != intrinsics.height))
      throw ShapeMismatchError("view " + std::to_string(i) + ": rgb size differs from intrinsics");
    if (!v.labels.data.empty()) {
      if (v.labels.width != intrinsics.width || v.labels.height != intrinsics.height)
        throw ShapeMismatchError("view " + std::to_string(i) + ": label size differs from intrinsics");
      for (auto l : v.labels.data)
        if (!is_known_label(l)) throw DomainError("view " + std::to_string(i) + ": unknown label value");
    }
  }
  if (views.front().labels.data.empty()) throw DomainError("view 0 carries no labels");
}

LabeledPointCloud lift_labels(const LabeledView& view, const CameraIntrinsics& K) {
  LabeledPointCloud cloud;
  for (int y = 0; y < view.depth.height(); ++y) {
    for (int x = 0; x < view.depth.width(); ++x) {
      const auto l = view.labels.at(x, y);
      if (l == static_cast<std::uint8_t>(PointLabel::kUnlabeled) || !view.depth.valid(x, y)) continue;
      cloud.push_back({back_project(Pixel{x, y}, view.depth.at(x, y), K), static_cast<PointLabel>(l)});
    }
  }
  return cloud;
}

namespace {

LabelImage transfer_view(const LabeledPointCloud& cloud, const Pose& rel, const LabeledView& target,
                         const CameraIntrinsics& K, const TransferOptions& opts, ViewTransferStats& stats) {
  const int w = K.width;
  const int h = K.height;
  std::vector<double> zbuf(static_cast<std::size_t>(w) * h, std::numeric_limits<double>::infinity());
  LabelImage out(w, h, opts.keep_unlabeled ? 255 : 0);
  std::vector<std::uint8_t> touched(static_cast<std::size_t>(w) * h, 0);

  for (const auto& pt : cloud) {
    const Vec3 q = rel * pt.position;
    if (!(q.z() > 0.0)) {
      ++stats.out_of_frame;
      continue;
    }
    const Vec2 uv = project(q, K);
    const double px = std::round(uv.x());
    const double py = std::round(uv.y());
    if (!(px >= 0.0 && py >= 0.0 && px < w && py < h)) {
      ++stats.out_of_frame;
      continue;
    }
    ++stats.projected;
    const int x = static_cast<int>(px);
    const int y = static_cast<int>(py);
    if (!target.depth.valid(x, y) || std::abs(q.z() - target.depth.at(x, y)) > opts.occlusion_tol) {
      ++stats.occluded;
      continue;
    }
    const std::size_t idx = static_cast<std::size_t>(y) * w + x;
    if (q.z() < zbuf[idx]) {
      zbuf[idx] = q.z();
      out.data[idx] = static_cast<std::uint8_t>(pt.label);
      touched[idx] = 1;
    }
  }
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    stats.written += touched[i];
    const auto l = out.data[i];
    ++stats.labeled[l == 255 ? 3 : l];
  }
  return out;
}

ViewTransferStats source_stats(const LabeledView& v) {
  ViewTransferStats s;
  for (auto l : v.labels.data) ++s.labeled[l == 255 ? 3 : l];
  return s;
}

}  // namespace

SceneCapture transfer_labels(const SceneCapture& scene, const TransferOptions& opts, TransferReport* report) {
  scene.validate();
  SceneCapture out = scene;
  const auto cloud = lift_labels(scene.views.front(), scene.intrinsics);
  TransferReport rep;
  rep.views.push_back(source_stats(scene.views.front()));
  for (std::size_t i = 1; i < scene.views.size(); ++i) {
    ViewTransferStats stats;
    const Pose rel = relative_pose(scene.views.front().cam_pose, scene.views[i].cam_pose);
    out.views[i].labels = transfer_view(cloud, rel, scene.views[i], scene.intrinsics, opts, stats);
    rep.views.push_back(stats);
  }
  if (report) *report = std::move(rep);
  return out;
}

TransferReport transfer_report(const SceneCapture& scene, const TransferOptions& opts) {
  TransferReport rep;
  transfer_labels(scene, opts, &rep);
  return rep;
}

}  // namespace binpick
