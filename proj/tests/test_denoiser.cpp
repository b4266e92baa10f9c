#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "plr/denoise.hpp"
#include "plr/metrics.hpp"
#include "plr/rng.hpp"
#include "plr/verify.hpp"

using plr::denoise::axis_offsets;
using plr::denoise::block_match;
using plr::denoise::build_group;
using plr::denoise::denoise_group_pca;
using plr::denoise::denoise_group_svd;
using plr::denoise::denoise_image;
using plr::denoise::DenoiseParams;
using plr::denoise::group_from_columns;
using plr::denoise::ideal_coefficients;
using plr::image::Patch;
using plr::denoise::PatchCoord;
using plr::denoise::reference_grid;
using plr::image::GrayImage;

namespace {

GrayImage random_image(std::uint64_t seed, Eigen::Index width, Eigen::Index height) {
  plr::rng::SplitMix gen(seed);
  GrayImage img(width, height);
  for (Eigen::Index r = 0; r < height; ++r)
    for (Eigen::Index c = 0; c < width; ++c) img(r, c) = gen.uniform(0.0, 255.0);
  return img;
}

Eigen::MatrixXd random_columns(std::uint64_t seed, Eigen::Index dim, Eigen::Index count) {
  plr::rng::SplitMix gen(seed);
  Eigen::MatrixXd m(dim, count);
  for (Eigen::Index c = 0; c < count; ++c)
    for (Eigen::Index r = 0; r < dim; ++r) m(r, c) = gen.uniform(0.0, 255.0);
  return m;
}

DenoiseParams small_params(double sigma) {
  DenoiseParams p;
  p.patch_size = 3;
  p.window = 9;
  p.group_size = 9;
  p.sigma = sigma;
  p.stride = 3;
  return p;
}

// Number of components the estimate actually uses, measured from its
// centered singular values.
Eigen::Index estimate_rank(const Eigen::MatrixXd& centered_est) {
  const auto f = plr::linalg::svd(centered_est);
  return (f.singular.array() > 1e-6 * std::max(f.singular[0], 1.0)).count();
}

}  // namespace

TEST_CASE("DenoiseParams: defaults and derived quantities") {
  const DenoiseParams p = DenoiseParams::defaults(20.0);
  CHECK(p.patch_size == 7);
  CHECK(p.window == 35);
  CHECK(p.group_size == 245);
  CHECK(p.t_factor == 1.5);
  CHECK(p.stride == 7);
  CHECK(p.path == plr::denoise::Path::kPca);
  CHECK(p.threshold() == doctest::Approx(30.0));
  CHECK(p.margin() == 21);  // ceil((35-7)/2) + 7
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("DenoiseParams: invalid combinations are rejected") {
  auto expect_invalid = [](auto&& mutate) {
    DenoiseParams p = DenoiseParams::defaults(10.0);
    mutate(p);
    CHECK_THROWS_AS(p.validate(), plr::InvalidParams);
  };
  expect_invalid([](DenoiseParams& p) { p.patch_size = 0; });
  expect_invalid([](DenoiseParams& p) { p.window = 6; });
  expect_invalid([](DenoiseParams& p) { p.group_size = 48; });   // below d^2
  expect_invalid([](DenoiseParams& p) { p.group_size = 842; });  // above (n-d+1)^2
  expect_invalid([](DenoiseParams& p) { p.stride = 0; });
  expect_invalid([](DenoiseParams& p) { p.sigma = -1.0; });
  expect_invalid([](DenoiseParams& p) { p.t_factor = -0.5; });
}

TEST_CASE("reference_grid: single tile when the patch fills the image") {
  const auto grid = reference_grid(7, 7, 7, 7);
  REQUIRE(grid.size() == 1);
  CHECK(grid[0] == PatchCoord{0, 0});
}

TEST_CASE("reference_grid: final offset clamps to the last valid position") {
  const auto offsets = axis_offsets(10, 7, 7);
  REQUIRE(offsets.size() == 2);
  CHECK(offsets[0] == 0);
  CHECK(offsets[1] == 3);
}

TEST_CASE("reference_grid: 512-wide axis yields 74 offsets ending at 505") {
  const auto offsets = axis_offsets(512, 7, 7);
  REQUIRE(offsets.size() == 74);
  CHECK(offsets[0] == 0);
  CHECK(offsets[72] == 504);
  CHECK(offsets[73] == 505);
  const auto grid = reference_grid(512, 512, 7, 7);
  CHECK(grid.size() == 74u * 74u);
}

TEST_CASE("reference_grid: stride <= d covers every pixel") {
  for (const int stride : {1, 2, 3}) {
    const auto offsets = axis_offsets(11, 3, stride);
    std::vector<bool> covered(11, false);
    for (const auto o : offsets)
      for (Eigen::Index i = o; i < o + 3; ++i) covered[static_cast<std::size_t>(i)] = true;
    for (const bool hit : covered) CHECK(hit);
  }
}

TEST_CASE("reference_grid: image smaller than a patch") {
  CHECK_THROWS_AS(axis_offsets(5, 7, 7), plr::ImageTooSmall);
}

TEST_CASE("block_match: reference always leads, ties then go row-major") {
  const GrayImage flat(32, 32, 42.0);
  DenoiseParams p = small_params(10.0);
  const PatchCoord ref{12, 14};
  const auto coords = block_match(flat, ref, p);
  REQUIRE(coords.size() == 9);
  CHECK(coords[0] == ref);
  // All distances tie at zero, so after the reference the window's
  // candidates follow in row-major order (reference skipped on re-encounter).
  const Eigen::Index top = 12 - 3, left = 14 - 3;
  std::size_t i = 1;
  for (Eigen::Index r = 0; r < 7 && i < coords.size(); ++r) {
    for (Eigen::Index c = 0; c < 7 && i < coords.size(); ++c) {
      const PatchCoord candidate{top + r, left + c};
      if (candidate == ref) continue;
      CHECK(coords[i] == candidate);
      ++i;
    }
  }
}

TEST_CASE("block_match: degenerate window returns only the reference") {
  const GrayImage img = random_image(3, 16, 16);
  DenoiseParams p;
  p.patch_size = 3;
  p.window = 3;  // single candidate
  p.group_size = 1;
  p.sigma = 5.0;
  p.stride = 3;
  const auto coords = block_match(img, {6, 6}, p);
  REQUIRE(coords.size() == 1);
  CHECK(coords[0] == PatchCoord{6, 6});
}

TEST_CASE("block_match: an exact copy outranks every non-identical patch") {
  GrayImage img = random_image(4, 40, 40);
  const PatchCoord ref{20, 20};
  const PatchCoord copy{17, 22};
  img.pix.block(copy.row, copy.col, 3, 3) = img.pix.block(ref.row, ref.col, 3, 3);
  DenoiseParams p = small_params(10.0);
  const auto coords = block_match(img, ref, p);
  REQUIRE(coords.size() >= 2);
  CHECK(coords[0] == ref);
  CHECK(coords[1] == copy);

  // And the tail is ordered by increasing distance.
  const auto dist = [&](PatchCoord c) {
    return (img.pix.block(c.row, c.col, 3, 3) - img.pix.block(ref.row, ref.col, 3, 3))
        .squaredNorm();
  };
  for (std::size_t i = 2; i + 1 < coords.size(); ++i) CHECK(dist(coords[i]) <= dist(coords[i + 1]));
}

TEST_CASE("block_match: selection matches exhaustive distance computation") {
  const GrayImage img = random_image(5, 30, 30);
  DenoiseParams p = small_params(10.0);
  const PatchCoord ref{15, 11};
  const auto coords = block_match(img, ref, p);

  // Every selected non-reference distance must be <= every rejected one.
  const auto dist = [&](PatchCoord c) {
    return (img.pix.block(c.row, c.col, 3, 3) - img.pix.block(ref.row, ref.col, 3, 3))
        .squaredNorm();
  };
  double worst_selected = 0.0;
  for (const auto& c : coords) worst_selected = std::max(worst_selected, dist(c));
  const Eigen::Index top = ref.row - 3, left = ref.col - 3;
  for (Eigen::Index r = 0; r < 7; ++r) {
    for (Eigen::Index c = 0; c < 7; ++c) {
      const PatchCoord cand{top + r, left + c};
      if (std::find(coords.begin(), coords.end(), cand) == coords.end())
        CHECK(dist(cand) >= worst_selected);
    }
  }
}

TEST_CASE("block_match: window leaving the padded image is an error") {
  const GrayImage img = random_image(6, 20, 20);
  DenoiseParams p = small_params(10.0);
  CHECK_THROWS_AS(block_match(img, {1, 10}, p), plr::WindowOutOfBounds);
  CHECK_THROWS_AS(block_match(img, {10, 18}, p), plr::WindowOutOfBounds);
}

TEST_CASE("build_group: constant image gives zero matrix and constant centroid") {
  const GrayImage flat(16, 16, 42.0);
  const auto group = build_group(flat, {{2, 3}, {5, 5}, {0, 0}}, 3);
  CHECK(group.dim() == 9);
  CHECK(group.size() == 3);
  CHECK(group.matrix.cwiseAbs().maxCoeff() == 0.0);
  CHECK((group.centroid.array() == 42.0).all());
}

TEST_CASE("build_group: columns are centered") {
  const GrayImage img = random_image(7, 30, 30);
  DenoiseParams p = small_params(10.0);
  const auto coords = block_match(img, {14, 14}, p);
  const auto group = build_group(img, coords, 3);
  CHECK(group.matrix.rowwise().mean().cwiseAbs().maxCoeff() <= 1e-9);
  CHECK(group.coords == coords);
}

TEST_CASE("group_from_columns: opposite columns keep their values") {
  Eigen::MatrixXd cols(4, 2);
  cols.col(0) << 1.0, -2.0, 3.0, -4.0;
  cols.col(1) = -cols.col(0);
  const auto group = group_from_columns(cols);
  CHECK(group.centroid.cwiseAbs().maxCoeff() == 0.0);
  CHECK((group.matrix - cols).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("denoise_group_pca: t = 0 on a full-rank group is the identity") {
  const auto group = group_from_columns(random_columns(8, 9, 24));
  const auto est = denoise_group_pca(group, 0.0);
  const Eigen::MatrixXd original = group.matrix.colwise() + group.centroid;
  CHECK((est.patches - original).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("denoise_group_pca: threshold above every component returns the centroid") {
  const auto group = group_from_columns(random_columns(9, 9, 24));
  // Largest per-component deviation, then a hair above it.
  Eigen::MatrixXd scatter = group.matrix * group.matrix.transpose();
  const auto es = plr::linalg::eig_sym(Eigen::MatrixXd((scatter + scatter.transpose()) / 2.0));
  const double t = std::sqrt(es.eigenvalues[0] / static_cast<double>(group.size())) * (1.0 + 1e-9);
  const auto est = denoise_group_pca(group, t);
  for (Eigen::Index l = 0; l < est.patches.cols(); ++l)
    CHECK((est.patches.col(l) - group.centroid).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("denoise_group_svd: zero-centered group estimates the centroid") {
  Eigen::MatrixXd cols(5, 6);
  for (Eigen::Index l = 0; l < 6; ++l) cols.col(l) = Eigen::VectorXd::LinSpaced(5, 1.0, 5.0);
  const auto group = group_from_columns(cols);
  CHECK(group.matrix.cwiseAbs().maxCoeff() <= 1e-12);
  const auto est = denoise_group_svd(group, 12.0);
  for (Eigen::Index l = 0; l < 6; ++l)
    CHECK((est.patches.col(l) - group.centroid).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("denoise paths: negative threshold is rejected") {
  const auto group = group_from_columns(random_columns(10, 4, 9));
  CHECK_THROWS_AS(denoise_group_pca(group, -1.0), plr::InvalidParams);
  CHECK_THROWS_AS(denoise_group_svd(group, -1.0), plr::InvalidParams);
}

TEST_CASE("path equivalence on random similarity groups") {
  for (std::uint64_t seed = 50; seed < 55; ++seed) {
    const auto group = group_from_columns(random_columns(seed, 49, 245));
    const auto pca = denoise_group_pca(group, 30.0);
    const auto svd = denoise_group_svd(group, 30.0);
    CHECK((pca.patches - svd.patches).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("variance identity holds on random groups") {
  for (std::uint64_t seed = 60; seed < 64; ++seed) {
    const auto group = group_from_columns(random_columns(seed, 49, 245));
    CHECK(plr::verify::variance_identity_error(group) <= 1e-8);
  }
}

TEST_CASE("shrinkage contracts centered energy and rank falls with t") {
  const auto group = group_from_columns(random_columns(70, 16, 48));
  const double base_energy = group.matrix.squaredNorm();
  double last_energy = base_energy;
  Eigen::Index last_rank = 17;
  for (const double t : {0.0, 10.0, 20.0, 40.0, 80.0, 160.0}) {
    const auto est = denoise_group_pca(group, t);
    const Eigen::MatrixXd centered = est.patches.colwise() - group.centroid;
    const double energy = centered.squaredNorm();
    CHECK(energy <= base_energy * (1.0 + 1e-12));
    CHECK(energy <= last_energy * (1.0 + 1e-12));
    const Eigen::Index rank = estimate_rank(centered);
    CHECK(rank <= last_rank);
    last_energy = energy;
    last_rank = rank;
  }
}

TEST_CASE("denoise_image: sigma 0 reproduces a full-rank noisy input") {
  const GrayImage img = random_image(80, 24, 24);
  const GrayImage out = denoise_image(img, small_params(0.0));
  REQUIRE(out.width() == img.width());
  REQUIRE(out.height() == img.height());
  CHECK((out.pix - img.pix).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("denoise_image: constant image passes through exactly") {
  const GrayImage flat(20, 20, 42.0);
  const GrayImage out = denoise_image(flat, small_params(25.0));
  CHECK((out.pix - flat.pix).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("denoise_image: output is identical for any worker count") {
  const GrayImage img = random_image(81, 26, 22);
  DenoiseParams p = small_params(15.0);
  p.stride = 2;
  const GrayImage one = denoise_image(img, p, 1);
  const GrayImage two = denoise_image(img, p, 2);
  const GrayImage five = denoise_image(img, p, 5);
  CHECK((one.pix - two.pix).cwiseAbs().maxCoeff() == 0.0);
  CHECK((one.pix - five.pix).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("denoise_image: global shift equivariance") {
  const GrayImage img = random_image(82, 20, 20);
  DenoiseParams p = small_params(12.0);
  p.stride = 2;
  GrayImage shifted = img;
  shifted.pix.array() += 31.5;
  const GrayImage base = denoise_image(img, p);
  const GrayImage moved = denoise_image(shifted, p);
  CHECK((moved.pix - (base.pix.array() + 31.5).matrix()).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("denoise_image: both paths agree end to end") {
  const GrayImage clean = random_image(83, 20, 20);
  const GrayImage noisy = plr::metrics::add_gaussian_noise(clean, {10.0, 5});
  DenoiseParams p = small_params(10.0);
  DenoiseParams q = p;
  q.path = plr::denoise::Path::kSvd;
  const GrayImage via_pca = denoise_image(noisy, p);
  const GrayImage via_svd = denoise_image(noisy, q);
  CHECK((via_pca.pix - via_svd.pix).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("denoise_image: undersized image is rejected") {
  CHECK_THROWS_AS(denoise_image(GrayImage(5, 5, 1.0), small_params(10.0)), plr::ImageTooSmall);
}

TEST_CASE("denoise_image: actually removes noise on a structured image") {
  // Piecewise-smooth synthetic scene: gradient background plus two flat boxes.
  GrayImage clean(48, 48);
  for (Eigen::Index r = 0; r < 48; ++r)
    for (Eigen::Index c = 0; c < 48; ++c) clean(r, c) = 60.0 + 2.0 * static_cast<double>(c);
  clean.pix.block(8, 8, 14, 14).setConstant(200.0);
  clean.pix.block(28, 24, 12, 16).setConstant(30.0);

  const GrayImage noisy = plr::metrics::add_gaussian_noise(clean, {20.0, 11});
  DenoiseParams p = DenoiseParams::defaults(20.0);
  p.patch_size = 5;
  p.window = 21;
  p.group_size = 125;
  p.stride = 5;
  const GrayImage restored = denoise_image(noisy, p);
  const double before = plr::metrics::psnr(clean, noisy);
  const double after = plr::metrics::psnr(clean, restored);
  CHECK(after - before >= 6.0);
}

TEST_CASE("ideal_coefficients: zero clean group keeps nothing") {
  const auto noisy_group = group_from_columns(random_columns(90, 9, 20));
  Eigen::MatrixXd scatter = noisy_group.matrix * noisy_group.matrix.transpose();
  const auto basis = plr::linalg::eig_sym(Eigen::MatrixXd((scatter + scatter.transpose()) / 2.0));
  const auto clean_group = group_from_columns(Eigen::MatrixXd::Zero(9, 20));
  const Eigen::VectorXi mask = ideal_coefficients(clean_group, basis, 10.0);
  CHECK(mask.cwiseAbs().maxCoeff() == 0);
}

TEST_CASE("ideal_coefficients: noiseless limit keeps exactly the energetic components") {
  const auto clean_group = group_from_columns(random_columns(91, 6, 15));
  Eigen::MatrixXd scatter = clean_group.matrix * clean_group.matrix.transpose();
  const auto basis = plr::linalg::eig_sym(Eigen::MatrixXd((scatter + scatter.transpose()) / 2.0));
  const Eigen::VectorXi mask = ideal_coefficients(clean_group, basis, 0.0);
  const double m = static_cast<double>(clean_group.size());
  for (Eigen::Index k = 0; k < 6; ++k) {
    const double theta_sq =
        (basis.basis.col(k).transpose() * clean_group.matrix).squaredNorm() / m;
    CHECK(mask[k] == (theta_sq > 0.0 ? 1 : 0));
  }
}

TEST_CASE("ideal_coefficients: dimension mismatch") {
  const auto clean_group = group_from_columns(random_columns(92, 6, 15));
  plr::linalg::EigenSystemXd basis;
  basis.basis = Eigen::MatrixXd::Identity(5, 5);
  basis.eigenvalues = Eigen::VectorXd::Ones(5);
  CHECK_THROWS_AS(ideal_coefficients(clean_group, basis, 1.0), plr::DimensionMismatch);
}
