#include "binpick/material.hpp"

#include <algorithm>
#include <cmath>

#include "binpick/rng.hpp"

namespace binpick {

std::string_view to_string(MaterialClass c) {
  switch (c) {
    case MaterialClass::kMetallic: return "metallic";
    case MaterialClass::kTransparent: return "transparent";
    case MaterialClass::kOther: return "other";
  }
  return "other";
}

std::optional<MaterialClass> material_from_string(std::string_view s) {
  for (auto c : {MaterialClass::kMetallic, MaterialClass::kTransparent, MaterialClass::kOther})
    if (to_string(c) == s) return c;
  return std::nullopt;
}

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::kMagnetic: return "magnetic";
    case Strategy::kGentleSuction: return "gentle_suction";
    case Strategy::kStandard: return "standard";
  }
  return "standard";
}

GraspCrop crop_at(const RgbImage& rgb, const Pixel& u, int crop_px) {
  if (u.x < 0 || u.y < 0 || u.x >= rgb.width || u.y >= rgb.height)
    throw OutOfBoundsError("crop center outside the image");
  if (crop_px < 1) throw DomainError("crop size must be at least one pixel");
  GraspCrop out{RgbImage(kCropSize, kCropSize), u};
  const double scale = static_cast<double>(crop_px) / kCropSize;
  const int x0 = u.x - crop_px / 2;
  const int y0 = u.y - crop_px / 2;
  auto clampx = [&](int x) { return std::clamp(x, 0, rgb.width - 1); };
  auto clampy = [&](int y) { return std::clamp(y, 0, rgb.height - 1); };
  for (int j = 0; j < kCropSize; ++j) {
    const double sy = y0 + (j + 0.5) * scale - 0.5;
    const int iy = static_cast<int>(std::floor(sy));
    const double fy = sy - iy;
    for (int i = 0; i < kCropSize; ++i) {
      const double sx = x0 + (i + 0.5) * scale - 0.5;
      const int ix = static_cast<int>(std::floor(sx));
      const double fx = sx - ix;
      for (int c = 0; c < 3; ++c) {
        const double v00 = rgb.at(clampx(ix), clampy(iy), c);
        const double v10 = rgb.at(clampx(ix + 1), clampy(iy), c);
        const double v01 = rgb.at(clampx(ix), clampy(iy + 1), c);
        const double v11 = rgb.at(clampx(ix + 1), clampy(iy + 1), c);
        const double v = (1 - fy) * ((1 - fx) * v00 + fx * v10) + fy * ((1 - fx) * v01 + fx * v11);
        out.rgb.at(i, j, c) = static_cast<std::uint8_t>(std::clamp<long>(std::lround(v), 0, 255));
      }
    }
  }
  return out;
}

DepthImage depth_window(const DepthImage& depth, const Pixel& u, int crop_px) {
  if (!depth.contains(u.x, u.y)) throw OutOfBoundsError("depth window center outside the image");
  if (crop_px < 1) throw DomainError("crop size must be at least one pixel");
  DepthImage out(crop_px, crop_px);
  const int x0 = u.x - crop_px / 2;
  const int y0 = u.y - crop_px / 2;
  for (int j = 0; j < crop_px; ++j)
    for (int i = 0; i < crop_px; ++i)
      out.at(i, j) = depth.at(std::clamp(x0 + i, 0, depth.width() - 1), std::clamp(y0 + j, 0, depth.height() - 1));
  return out;
}

MaterialClass heuristic_classifier(const GraspCrop& crop, const DepthImage& aux_depth, const HeuristicThresholds& th) {
  std::size_t invalid = 0;
  for (float d : aux_depth.data()) invalid += DepthImage::is_valid_depth(d) ? 0 : 1;
  const double n_depth = static_cast<double>(aux_depth.data().size());
  if (n_depth > 0 && invalid / n_depth > th.invalid_fraction) return MaterialClass::kTransparent;

  const int n = crop.rgb.width * crop.rgb.height;
  double sat_sum = 0.0;
  double v_sum = 0.0;
  double v_sq = 0.0;
  for (int y = 0; y < crop.rgb.height; ++y) {
    for (int x = 0; x < crop.rgb.width; ++x) {
      const double r = crop.rgb.at(x, y, 0) / 255.0;
      const double g = crop.rgb.at(x, y, 1) / 255.0;
      const double b = crop.rgb.at(x, y, 2) / 255.0;
      const double mx = std::max({r, g, b});
      const double mn = std::min({r, g, b});
      sat_sum += mx > 0.0 ? (mx - mn) / mx : 0.0;
      v_sum += mx;
      v_sq += mx * mx;
    }
  }
  const double mean_sat = sat_sum / n;
  const double mean_v = v_sum / n;
  const double var_v = v_sq / n - mean_v * mean_v;
  if (mean_sat < th.max_mean_saturation && var_v > th.min_brightness_variance) return MaterialClass::kMetallic;
  return MaterialClass::kOther;
}

Strategy dispatch_strategy(MaterialClass c, const GraspSelection&) {
  switch (c) {
    case MaterialClass::kMetallic: return Strategy::kMagnetic;
    case MaterialClass::kTransparent: return Strategy::kGentleSuction;
    case MaterialClass::kOther: return Strategy::kStandard;
  }
  return Strategy::kStandard;
}

GraspSelection apply_strategy(Strategy s, const GraspSelection& selection, const AffordanceBundle& bundle) {
  GraspSelection out = selection;
  if (s == Strategy::kGentleSuction && out.mode != GraspMode::kSuction) {
    out.mode = GraspMode::kSuction;
    out.score = bundle.suction.at(kSuccessChannel, out.pixel.y, out.pixel.x);
  }
  return out;
}

std::vector<Pixel> sample_crop_centers(const Pixel& center, int count, double sigma_px, std::uint64_t seed,
                                       int width, int height) {
  Rng rng(seed);
  std::vector<Pixel> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i) {
    const int x = static_cast<int>(std::lround(rng.normal(center.x, sigma_px)));
    const int y = static_cast<int>(std::lround(rng.normal(center.y, sigma_px)));
    out.push_back({std::clamp(x, 0, width - 1), std::clamp(y, 0, height - 1)});
  }
  return out;
}

}  // namespace binpick
