#pragma once

#include <cstdint>

#include "plr/image.hpp"

namespace plr::metrics {

struct NoiseSpec {
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

/// Adds i.i.d. N(0, sigma^2) noise, one Box-Muller variate per pixel keyed by
/// (seed, row-major pixel index). Reproducible and independent of iteration
/// order; no clamping or quantization.
image::GrayImage add_gaussian_noise(const image::GrayImage& clean, const NoiseSpec& spec);

double mse(const image::GrayImage& a, const image::GrayImage& b);

/// 10*log10(255^2 / MSE) in dB, computed on real-valued images.
/// Throws InfinitePsnr when the images are identical (MSE = 0).
double psnr(const image::GrayImage& reference, const image::GrayImage& estimate);

}  // namespace plr::metrics
