#include "binpick/affordance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace binpick {

Tensor3::Tensor3(int channels, int height, int width, float fill)
    : channels_(channels), height_(height), width_(width),
      data_(static_cast<std::size_t>(channels) * height * width, fill) {
  if (channels <= 0 || height <= 0 || width <= 0) throw DomainError("tensor dimensions must be positive");
}

Tensor3::Tensor3(int channels, int height, int width, std::vector<float> data)
    : channels_(channels), height_(height), width_(width), data_(std::move(data)) {
  if (channels <= 0 || height <= 0 || width <= 0) throw DomainError("tensor dimensions must be positive");
  if (data_.size() != static_cast<std::size_t>(channels) * height * width)
    throw ShapeMismatchError("tensor buffer does not match its shape");
}

namespace {

void check_distribution(const Tensor3& t, const char* name, double tol) {
  for (int y = 0; y < t.height(); ++y) {
    for (int x = 0; x < t.width(); ++x) {
      double sum = 0.0;
      for (int c = 0; c < t.channels(); ++c) {
        const float v = t.at(c, y, x);
        if (!(v >= 0.0f && v <= 1.0f))
          throw DomainError(std::string(name) + " probability outside [0,1] at (" + std::to_string(x) + "," +
                            std::to_string(y) + ")");
        sum += v;
      }
      if (std::abs(sum - 1.0) > tol)
        throw DomainError(std::string(name) + " channels do not sum to 1 at (" + std::to_string(x) + "," +
                          std::to_string(y) + ")");
    }
  }
}

void normalize(Tensor3& t) {
  for (int y = 0; y < t.height(); ++y) {
    for (int x = 0; x < t.width(); ++x) {
      double sum = 0.0;
      for (int c = 0; c < t.channels(); ++c) sum += std::max(0.0f, t.at(c, y, x));
      for (int c = 0; c < t.channels(); ++c) {
        t.at(c, y, x) = sum > 0.0 ? static_cast<float>(std::max(0.0f, t.at(c, y, x)) / sum)
                                  : 1.0f / static_cast<float>(t.channels());
      }
    }
  }
}

}  // namespace

void AffordanceBundle::validate(double tol) const {
  if (suction.channels() != 3 || finger.channels() != 3 || angle.channels() != kAngleBins)
    throw ShapeMismatchError("affordance channel counts must be 3, 3 and 12");
  if (suction.height() != finger.height() || suction.height() != angle.height() ||
      suction.width() != finger.width() || suction.width() != angle.width())
    throw ShapeMismatchError("affordance tensors disagree on H x W");
  check_distribution(suction, "suction", tol);
  check_distribution(finger, "finger", tol);
  check_distribution(angle, "angle", tol);
}

void AffordanceBundle::renormalize() {
  normalize(suction);
  normalize(finger);
  normalize(angle);
}

CandidateMask::CandidateMask(int w, int h, bool fill)
    : width(w), height(h),
      suction(static_cast<std::size_t>(w) * h, fill ? 1 : 0),
      finger(static_cast<std::size_t>(w) * h, fill ? 1 : 0) {}

void CandidateMask::set(GraspMode mode, int x, int y, bool v) {
  auto& m = mode == GraspMode::kSuction ? suction : finger;
  m[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0;
}

std::size_t CandidateMask::count(GraspMode mode) const {
  const auto& m = mode == GraspMode::kSuction ? suction : finger;
  return static_cast<std::size_t>(std::count(m.begin(), m.end(), std::uint8_t{1}));
}

namespace {

struct Best {
  bool found = false;
  double score = -1.0;
  Pixel pixel;
};

Best argmax_success(const Tensor3& map, const std::vector<std::uint8_t>& valid, int w, int h) {
  Best best;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!valid[static_cast<std::size_t>(y) * w + x]) continue;
      const double s = map.at(kSuccessChannel, y, x);
      if (!best.found || s > best.score) best = {true, s, {x, y}};
    }
  }
  return best;
}

}  // namespace

GraspSelection select_grasp(const AffordanceBundle& bundle, const CandidateMask& mask, double eps_s,
                            SelectionPolicy policy) {
  const int w = bundle.width();
  const int h = bundle.height();
  if (mask.width != w || mask.height != h) throw ShapeMismatchError("candidate mask does not match bundle");

  const Best s = argmax_success(bundle.suction, mask.suction, w, h);
  const Best f = argmax_success(bundle.finger, mask.finger, w, h);
  if (!s.found && !f.found) throw EmptyCandidateError("no grasp candidates in either mode");

  GraspSelection out;
  const bool take_suction = (policy == SelectionPolicy::kSuctionPriority && s.found && s.score > eps_s) ||
                            !f.found || (s.found && s.score >= f.score);
  if (take_suction) {
    out.mode = GraspMode::kSuction;
    out.pixel = s.pixel;
    out.score = s.score;
  } else {
    out.mode = GraspMode::kFinger;
    out.pixel = f.pixel;
    out.score = f.score;
  }
  out.angle_deg = decode_angle(bundle, out.pixel);
  return out;
}

double decode_angle(const AffordanceBundle& bundle, const Pixel& u) {
  if (u.x < 0 || u.y < 0 || u.x >= bundle.angle.width() || u.y >= bundle.angle.height())
    throw OutOfBoundsError("angle lookup outside the affordance map");
  int best = 0;
  for (int c = 1; c < bundle.angle.channels(); ++c)
    if (bundle.angle.at(c, u.y, u.x) > bundle.angle.at(best, u.y, u.x)) best = c;
  return -90.0 + kAngleBinDegrees * best;
}

int angle_bin(double folded_deg) {
  const int bin = static_cast<int>(std::lround((folded_deg + 90.0) / kAngleBinDegrees));
  return ((bin % kAngleBins) + kAngleBins) % kAngleBins;
}

CandidateMask build_candidate_mask(const AffordanceBundle& bundle, const DepthImage& depth, double min_prob) {
  if (depth.width() != bundle.width() || depth.height() != bundle.height() ||
      bundle.finger.width() != bundle.width() || bundle.finger.height() != bundle.height())
    throw ShapeMismatchError("depth and affordance shapes disagree");
  CandidateMask mask(bundle.width(), bundle.height());
  for (int y = 0; y < depth.height(); ++y) {
    for (int x = 0; x < depth.width(); ++x) {
      if (!depth.valid(x, y)) continue;
      mask.set(GraspMode::kSuction, x, y, bundle.suction.at(kSuccessChannel, y, x) >= min_prob);
      mask.set(GraspMode::kFinger, x, y, bundle.finger.at(kSuccessChannel, y, x) >= min_prob);
    }
  }
  return mask;
}

}  // namespace binpick
