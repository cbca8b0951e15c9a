#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "binpick/affordance.hpp"
#include "binpick/geometry.hpp"
#include "binpick/image.hpp"

namespace binpick {

enum class MaterialClass : std::uint8_t { kMetallic, kTransparent, kOther };

std::string_view to_string(MaterialClass c);
std::optional<MaterialClass> material_from_string(std::string_view s);

inline constexpr int kCropSize = 80;

struct GraspCrop {
  RgbImage rgb;  // always kCropSize x kCropSize
  Pixel source_pixel;
};

/// crop_px x crop_px window centered at `u` (border pixels replicated),
/// bilinearly resampled to 80 x 80. Throws OutOfBoundsError.
GraspCrop crop_at(const RgbImage& rgb, const Pixel& u, int crop_px);

/// The same window of the depth image, without resampling.
DepthImage depth_window(const DepthImage& depth, const Pixel& u, int crop_px);

/// Seam for a surface-material classifier (a learned model or the heuristic below).
class MaterialClassifier {
 public:
  virtual ~MaterialClassifier() = default;
  virtual MaterialClass classify(const GraspCrop& crop, const DepthImage& aux_depth) const = 0;
};

struct HeuristicThresholds {
  double invalid_fraction = 0.4;          // above -> transparent
  double max_mean_saturation = 0.15;      // below and ...
  double min_brightness_variance = 0.02;  // ... above -> metallic (specular)
};

MaterialClass heuristic_classifier(const GraspCrop& crop, const DepthImage& aux_depth,
                                   const HeuristicThresholds& th = {});

class HeuristicClassifier final : public MaterialClassifier {
 public:
  explicit HeuristicClassifier(HeuristicThresholds th = {}) : th_(th) {}
  MaterialClass classify(const GraspCrop& crop, const DepthImage& aux_depth) const override {
    return heuristic_classifier(crop, aux_depth, th_);
  }

 private:
  HeuristicThresholds th_;
};

enum class Strategy : std::uint8_t { kMagnetic, kGentleSuction, kStandard };

std::string_view to_string(Strategy s);

/// metallic -> magnetic, transparent -> gentle suction, other -> standard.
Strategy dispatch_strategy(MaterialClass c, const GraspSelection& selection);

/// Gentle suction forces suction mode at the selected pixel (score re-read
/// from the suction map); the other strategies pass the selection through.
GraspSelection apply_strategy(Strategy s, const GraspSelection& selection, const AffordanceBundle& bundle);

/// Crop centers drawn from an isotropic Gaussian around `center`, clamped to the image.
std::vector<Pixel> sample_crop_centers(const Pixel& center, int count, double sigma_px, std::uint64_t seed,
                                       int width, int height);

}  // namespace binpick
