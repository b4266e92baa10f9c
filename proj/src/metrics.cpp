#include "plr/metrics.hpp"

#include <cmath>

#include "plr/rng.hpp"

namespace plr::metrics {

image::GrayImage add_gaussian_noise(const image::GrayImage& clean, const NoiseSpec& spec) {
  image::GrayImage out = clean;
  const Eigen::Index w = clean.width();
  for (Eigen::Index r = 0; r < clean.height(); ++r) {
    for (Eigen::Index c = 0; c < w; ++c) {
      const auto idx = static_cast<std::uint64_t>(r * w + c);
      out(r, c) += spec.sigma * rng::normal(spec.seed, idx);
    }
  }
  return out;
}

double mse(const image::GrayImage& a, const image::GrayImage& b) {
  if (a.width() != b.width() || a.height() != b.height())
    throw DimensionMismatch("mse: image sizes differ");
  const double n = static_cast<double>(a.width() * a.height());
  return (a.pix - b.pix).squaredNorm() / n;
}

double psnr(const image::GrayImage& reference, const image::GrayImage& estimate) {
  const double err = mse(reference, estimate);
  if (err == 0.0) throw InfinitePsnr("psnr: images are identical");
  return 10.0 * std::log10(255.0 * 255.0 / err);
}

}  // namespace plr::metrics
