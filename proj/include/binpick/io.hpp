#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "binpick/affordance.hpp"
#include "binpick/bin_model.hpp"
#include "binpick/geometry.hpp"
#include "binpick/gripper.hpp"
#include "binpick/image.hpp"
#include "binpick/labelxfer.hpp"
#include "binpick/sim.hpp"

namespace binpick::io {

inline constexpr std::string_view kToolVersion = "binpick 1.0.0";

// ---------------------------------------------------------------------------
// Tensor container: "GRSPTNSR", u32 LE header length, JSON header, LE f32 payload.
// byte_offset is relative to the start of the payload.

struct NamedTensor {
  std::string name;
  std::vector<std::int64_t> shape;
  std::vector<float> data;

  std::size_t element_count() const;
};

std::vector<std::uint8_t> encode_tensors(const std::vector<NamedTensor>& tensors);
/// Throws FormatError on bad magic, truncated data, overlapping or out-of-range offsets.
std::vector<NamedTensor> decode_tensors(const std::vector<std::uint8_t>& bytes);

void write_tensors(const std::filesystem::path& path, const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> read_tensors(const std::filesystem::path& path);

/// Looks up a tensor by name; throws FormatError when missing.
const NamedTensor& find_tensor(const std::vector<NamedTensor>& tensors, std::string_view name);

void write_depth(const std::filesystem::path& path, const DepthImage& depth);
DepthImage read_depth(const std::filesystem::path& path);
void write_affordance(const std::filesystem::path& path, const AffordanceBundle& bundle);
/// Reads and validates shapes (3,H,W), (3,H,W), (12,H,W). Throws ShapeMismatchError.
AffordanceBundle read_affordance(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// PNG

void write_png(const std::filesystem::path& path, const RgbImage& image);
RgbImage read_png_rgb(const std::filesystem::path& path);
/// 8-bit paletted PNG; index 0 background, 1 success, 2 failure, 255 unlabeled.
void write_label_png(const std::filesystem::path& path, const LabelImage& labels);
/// Accepts paletted or 8-bit grayscale images (raw indices / gray values).
LabelImage read_label_png(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Files and hashing

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);
void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);
std::string read_text(const std::filesystem::path& path);
/// Writes text atomically enough for tools: to a sibling temp file, then renames.
void write_text(const std::filesystem::path& path, std::string_view text);
/// FNV-1a 64 as 16 hex digits.
std::string fnv1a_hex(const std::vector<std::uint8_t>& bytes);

// ---------------------------------------------------------------------------
// PLY

/// ASCII PLY triangle mesh of the bin walls and floor, objects and an optional gripper.
std::string scene_ply(const Scene& scene, const std::optional<Pose>& gripper_pose, const GripperConfig& config,
                      const GripperGeometry& geom);

}  // namespace binpick::io
