#pragma once

#include <Eigen/Dense>

#include <vector>

#include "plr/errors.hpp"
#include "plr/image.hpp"
#include "plr/linalg.hpp"

// Patch-grouping denoiser: every reference patch gathers its most similar
// neighbors into a d^2 x m matrix, the group is shrunk by hard thresholding
// in its own principal basis (equivalently, of its singular values), and the
// overlapping per-patch estimates are averaged back into the image.
namespace plr::denoise {

enum class Path { kPca, kSvd };

struct PatchCoord {
  Eigen::Index row = 0;
  Eigen::Index col = 0;
  friend bool operator==(const PatchCoord&, const PatchCoord&) = default;
};

struct DenoiseParams {
  int patch_size = 7;    // d, patch side
  int window = 35;       // n, block-matching search window side
  int group_size = 245;  // m, patches per group; default 5*d^2
  double sigma = 0.0;    // noise standard deviation, intensity units
  double t_factor = 1.5; // threshold t = t_factor * sigma
  int stride = 7;        // reference-grid step
  Path path = Path::kPca;

  double threshold() const { return t_factor * sigma; }

  /// Padding that keeps every search window and patch in range.
  int margin() const { return (window - patch_size + 1) / 2 + patch_size; }

  /// Throws InvalidParams unless d >= 1, n >= d, d^2 <= m <= (n-d+1)^2,
  /// stride >= 1, sigma >= 0 and t_factor >= 0.
  void validate() const;

  static DenoiseParams defaults(double sigma_value) {
    DenoiseParams p;
    p.sigma = sigma_value;
    return p;
  }
};

/// Centered stack of similar patches: column l holds patch l minus the
/// group centroid. coords[0] is the reference patch.
struct SimilarityGroup {
  Eigen::MatrixXd matrix;    // d^2 x m, columns sum to ~0
  Eigen::VectorXd centroid;  // mean of the raw patch vectors
  std::vector<PatchCoord> coords;

  Eigen::Index dim() const { return matrix.rows(); }
  Eigen::Index size() const { return matrix.cols(); }
};

/// Denoised patch vectors with the centroid restored, ready to aggregate.
struct GroupEstimate {
  Eigen::MatrixXd patches;  // d^2 x m
  std::vector<PatchCoord> coords;
};

/// Top-left corners of the reference patches: multiples of `stride` plus a
/// final row/column clamped to the last valid offset, so stride <= d covers
/// every pixel.
std::vector<Eigen::Index> axis_offsets(Eigen::Index size, int d, int stride);
std::vector<PatchCoord> reference_grid(Eigen::Index width, Eigen::Index height, int d, int stride);

/// The group_size patches closest to the reference in l2 distance among the
/// (n-d+1)^2 candidates of its search window, reference first. Distances are
/// measured on raw (uncentered) values; ties resolve in row-major candidate
/// order, and the remainder of the result is sorted by (distance, row-major).
std::vector<PatchCoord> block_match(const image::GrayImage& padded, PatchCoord ref,
                                    const DenoiseParams& params);

SimilarityGroup build_group(const image::GrayImage& padded, const std::vector<PatchCoord>& coords,
                            int patch_size);

/// Builds a group directly from raw patch vectors (one per column); used for
/// synthetic groups in diagnostics and verification.
SimilarityGroup group_from_columns(Eigen::MatrixXd patch_columns, std::vector<PatchCoord> coords = {});

/// Shrinks the group in the eigenbasis of matrix * matrix^T: coefficients of
/// components whose per-patch variance is at most t^2 are dropped, the rest
/// kept unchanged, and the centroid added back.
GroupEstimate denoise_group_pca(const SimilarityGroup& group, double t);

/// Same estimate through the singular value route: hard-threshold the
/// singular values of the centered matrix at t*sqrt(m). Agrees with the PCA
/// path entrywise.
GroupEstimate denoise_group_svd(const SimilarityGroup& group, double t);

/// Full pipeline: pad, match, shrink, aggregate, crop. Output has the input
/// dimensions and is bit-identical for any thread count (group results are
/// accumulated in reference-grid order regardless of scheduling).
/// threads <= 0 selects hardware concurrency.
image::GrayImage denoise_image(const image::GrayImage& noisy, const DenoiseParams& params,
                               int threads = 1);

/// Diagnostic for the threshold rule: given the basis learned from the noisy
/// group and the corresponding clean group, marks component k with 1 when
/// the clean coefficient variance exceeds sigma^2 (the mask an oracle with
/// access to the clean patches would keep).
Eigen::VectorXi ideal_coefficients(const SimilarityGroup& clean_group,
                                   const linalg::EigenSystemXd& basis, double sigma);

}  // namespace plr::denoise
