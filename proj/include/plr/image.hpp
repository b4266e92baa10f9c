#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <string>

#include "plr/errors.hpp"

namespace plr::image {

/// Grayscale image with real-valued intensities, nominal range [0, 255].
/// Values may leave that range during processing; they are rounded and
/// clamped only on 8-bit PGM export.
struct GrayImage {
  Eigen::MatrixXd pix;  // height x width, row-major scanlines as matrix rows

  GrayImage() = default;
  GrayImage(Eigen::Index width, Eigen::Index height, double fill = 0.0)
      : pix(Eigen::MatrixXd::Constant(height, width, fill)) {}
  explicit GrayImage(Eigen::MatrixXd m) : pix(std::move(m)) {}

  Eigen::Index width() const { return pix.cols(); }
  Eigen::Index height() const { return pix.rows(); }
  double& operator()(Eigen::Index row, Eigen::Index col) { return pix(row, col); }
  double operator()(Eigen::Index row, Eigen::Index col) const { return pix(row, col); }
};

/// A d x d block vectorized column-by-column (column j stacked before j+1),
/// anchored at its top-left corner.
struct Patch {
  Eigen::Index row = 0;
  Eigen::Index col = 0;
  Eigen::VectorXd values;  // length d^2
};

// PGM codec. Reader accepts binary (P5) and ASCII (P2) with '#' comments and
// maxval <= 255; writer emits exactly "P5\n<w> <h>\n255\n" + raw bytes with
// samples rounded half-up then clamped to [0, 255].
GrayImage read_pgm(const std::string& bytes);
std::string write_pgm(const GrayImage& img);

GrayImage load_pgm(const std::filesystem::path& path);    // throws IoError / ParseError
void save_pgm(const std::filesystem::path& path, const GrayImage& img);

/// Mirror padding with the edge pixel repeated: coordinate -1 maps to 0,
/// -2 to 1, width to width-1. Requires margin <= min(width, height).
GrayImage pad_symmetric(const GrayImage& img, Eigen::Index margin);

/// Removes a margin from all four sides; inverse of pad_symmetric.
GrayImage crop(const GrayImage& img, Eigen::Index margin);

Patch extract_patch(const GrayImage& img, Eigen::Index row, Eigen::Index col, Eigen::Index d);

/// Per-pixel running sum and count of overlapping patch estimates.
/// Merging two accumulators adds both fields, so parallel pipelines can keep
/// one per worker and combine afterwards.
class Accumulator {
 public:
  Accumulator(Eigen::Index width, Eigen::Index height)
      : sum_(Eigen::MatrixXd::Zero(height, width)), count_(Eigen::MatrixXd::Zero(height, width)) {}

  void add(Eigen::Index row, Eigen::Index col, const Eigen::Ref<const Eigen::VectorXd>& values);
  void add(const Patch& patch) { add(patch.row, patch.col, patch.values); }
  void merge(const Accumulator& other);

  /// Accumulator restricted to the interior, margin pixels off each side.
  Accumulator cropped(Eigen::Index margin) const;

  /// Mean of the accumulated estimates; throws UncoveredPixels if any pixel
  /// never received one.
  GrayImage finalize() const;

  Eigen::Index width() const { return sum_.cols(); }
  Eigen::Index height() const { return sum_.rows(); }

 private:
  Eigen::MatrixXd sum_;
  Eigen::MatrixXd count_;
};

}  // namespace plr::image
