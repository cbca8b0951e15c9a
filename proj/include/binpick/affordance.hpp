#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "binpick/geometry.hpp"

namespace binpick {

/// Channel-major, row-major float tensor of shape (channels, height, width).
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(int channels, int height, int width, float fill = 0.0f);
  Tensor3(int channels, int height, int width, std::vector<float> data);

  int channels() const { return channels_; }
  int height() const { return height_; }
  int width() const { return width_; }
  float at(int c, int y, int x) const { return data_[index(c, y, x)]; }
  float& at(int c, int y, int x) { return data_[index(c, y, x)]; }
  std::span<const float> data() const { return data_; }
  std::span<float> data() { return data_; }

 private:
  std::size_t index(int c, int y, int x) const {
    return (static_cast<std::size_t>(c) * height_ + y) * width_ + x;
  }
  int channels_ = 0;
  int height_ = 0;
  int width_ = 0;
  std::vector<float> data_;
};

/// Channel order shared by the suction and finger maps.
enum AffordanceChannel : int { kSuccessChannel = 0, kFailureChannel = 1, kBackgroundChannel = 2 };

inline constexpr int kAngleBins = 12;
inline constexpr double kAngleBinDegrees = 15.0;

struct AffordanceBundle {
  Tensor3 suction;  // (3, H, W)
  Tensor3 finger;   // (3, H, W)
  Tensor3 angle;    // (12, H, W)

  int height() const { return suction.height(); }
  int width() const { return suction.width(); }

  /// Checks shapes, the [0,1] range and per-pixel sums (within `tol`).
  /// Throws ShapeMismatchError or DomainError.
  void validate(double tol = 1e-3) const;
  /// Divides every pixel's channels by their sum (pixels summing to 0 become uniform).
  void renormalize();
};

enum class GraspMode : std::uint8_t { kSuction, kFinger };

struct GraspSelection {
  GraspMode mode = GraspMode::kSuction;
  Pixel pixel;
  double score = 0.0;
  double angle_deg = -90.0;
};

struct CandidateMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> suction;
  std::vector<std::uint8_t> finger;

  CandidateMask() = default;
  CandidateMask(int w, int h, bool fill = false);
  bool suction_at(int x, int y) const { return suction[static_cast<std::size_t>(y) * width + x] != 0; }
  bool finger_at(int x, int y) const { return finger[static_cast<std::size_t>(y) * width + x] != 0; }
  void set(GraspMode mode, int x, int y, bool v);
  std::size_t count(GraspMode mode) const;
  bool empty() const { return count(GraspMode::kSuction) == 0 && count(GraspMode::kFinger) == 0; }
};

enum class SelectionPolicy : std::uint8_t {
  kSuctionPriority,  // suction wins whenever its best score exceeds eps_s
  kGreedy,           // plain argmax over both modes
};

inline constexpr double kDefaultSuctionThreshold = 0.4;

/// Picks the grasp mode and pixel. Ties go to suction, then to the first pixel
/// in row-major order. Throws EmptyCandidateError when both masks are empty.
GraspSelection select_grasp(const AffordanceBundle& bundle, const CandidateMask& mask,
                            double eps_s = kDefaultSuctionThreshold,
                            SelectionPolicy policy = SelectionPolicy::kSuctionPriority);

/// Angle of the most probable angle bin at `u`: -90 + 15 * channel.
double decode_angle(const AffordanceBundle& bundle, const Pixel& u);
/// Bin index for an angle already folded into [-90, 90).
int angle_bin(double folded_deg);

/// Valid iff depth is valid and the mode's success probability >= min_prob.
CandidateMask build_candidate_mask(const AffordanceBundle& bundle, const DepthImage& depth, double min_prob);

}  // namespace binpick
