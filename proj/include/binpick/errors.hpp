#pragma once

#include <stdexcept>
#include <string>

namespace binpick {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidDepthError : public Error { using Error::Error; };
class BehindCameraError : public Error { using Error::Error; };
class InsufficientSupportError : public Error { using Error::Error; };
class EmptyCandidateError : public Error { using Error::Error; };
class ShapeMismatchError : public Error { using Error::Error; };
class OutOfBinError : public Error { using Error::Error; };
class InteriorRegionError : public Error { using Error::Error; };
class DomainError : public Error { using Error::Error; };
class PlacementError : public Error { using Error::Error; };
class OutOfBoundsError : public Error { using Error::Error; };
/// Malformed file or document.
class FormatError : public Error { using Error::Error; };

}  // namespace binpick
