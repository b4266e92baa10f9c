#pragma once

#include <stdexcept>
#include <string>

namespace plr {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// linalg
struct NonSymmetric : Error { using Error::Error; };
struct NonFinite : Error { using Error::Error; };
struct ShapeError : Error { using Error::Error; };

// image
struct ParseError : Error { using Error::Error; };
struct UnsupportedMaxval : Error { using Error::Error; };
struct MarginTooLarge : Error { using Error::Error; };
struct OutOfBounds : Error { using Error::Error; };
struct UncoveredPixels : Error { using Error::Error; };

// denoiser
struct ImageTooSmall : Error { using Error::Error; };
struct WindowOutOfBounds : Error { using Error::Error; };
struct InvalidParams : Error { using Error::Error; };

// metrics
struct DimensionMismatch : Error { using Error::Error; };
struct InfinitePsnr : Error { using Error::Error; };

// cli / file handling
struct IoError : Error { using Error::Error; };

}  // namespace plr
