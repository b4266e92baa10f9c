#include "plr/denoise.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>

namespace plr::denoise {

namespace {

// Runs fn(i) for i in [0, count) on up to `threads` workers with contiguous
// static blocks. The first exception thrown by any worker is rethrown.
template <class Fn>
void parallel_for(Eigen::Index count, int threads, const Fn& fn) {
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(count)));
  if (workers == 1) {
    for (Eigen::Index i = 0; i < count; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run_block = [&](Eigen::Index begin, Eigen::Index end) {
    try {
      for (Eigen::Index i = begin; i < end; ++i) fn(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers) - 1);
  const Eigen::Index chunk = (count + workers - 1) / workers;
  for (int t = 1; t < workers; ++t) {
    const Eigen::Index begin = t * chunk;
    if (begin >= count) break;
    pool.emplace_back(run_block, begin, std::min(count, begin + chunk));
  }
  run_block(0, std::min(count, chunk));
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

// Indices of components to keep: singular value of the centered stack
// strictly above t*sqrt(m). Both denoising paths share this predicate so
// their keep decisions are identical down to the last bit.
std::vector<Eigen::Index> kept_components(const Eigen::VectorXd& eigenvalues, double t,
                                          Eigen::Index m) {
  const double tau = t * std::sqrt(static_cast<double>(m));
  std::vector<Eigen::Index> kept;
  for (Eigen::Index k = 0; k < eigenvalues.size(); ++k) {
    if (std::sqrt(std::max(eigenvalues[k], 0.0)) > tau) kept.push_back(k);
  }
  return kept;
}

Eigen::MatrixXd symmetric_gram(const Eigen::MatrixXd& s) {
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(s.rows(), s.rows());
  gram.selfadjointView<Eigen::Lower>().rankUpdate(s);
  return gram.selfadjointView<Eigen::Lower>();
}

}  // namespace

void DenoiseParams::validate() const {
  if (patch_size < 1) throw InvalidParams("params: patch size must be >= 1");
  if (window < patch_size) throw InvalidParams("params: window smaller than patch");
  const long d2 = static_cast<long>(patch_size) * patch_size;
  const long candidates = static_cast<long>(window - patch_size + 1) * (window - patch_size + 1);
  if (group_size < d2) throw InvalidParams("params: group size must be >= d^2");
  if (group_size > candidates) throw InvalidParams("params: group size exceeds window candidates");
  if (stride < 1) throw InvalidParams("params: stride must be >= 1");
  if (!(sigma >= 0.0)) throw InvalidParams("params: sigma must be >= 0");
  if (!(t_factor >= 0.0)) throw InvalidParams("params: t-factor must be >= 0");
}

std::vector<Eigen::Index> axis_offsets(Eigen::Index size, int d, int stride) {
  if (size < d) throw ImageTooSmall("reference grid: image smaller than patch");
  const Eigen::Index last = size - d;
  std::vector<Eigen::Index> offsets;
  for (Eigen::Index o = 0; o <= last; o += stride) offsets.push_back(o);
  if (offsets.back() != last) offsets.push_back(last);
  return offsets;
}

std::vector<PatchCoord> reference_grid(Eigen::Index width, Eigen::Index height, int d, int stride) {
  const auto rows = axis_offsets(height, d, stride);
  const auto cols = axis_offsets(width, d, stride);
  std::vector<PatchCoord> grid;
  grid.reserve(rows.size() * cols.size());
  for (const auto r : rows)
    for (const auto c : cols) grid.push_back({r, c});
  return grid;
}

std::vector<PatchCoord> block_match(const image::GrayImage& padded, PatchCoord ref,
                                    const DenoiseParams& params) {
  const int d = params.patch_size;
  const int n = params.window;
  const Eigen::Index m = params.group_size;
  const Eigen::Index top = ref.row - (n - d) / 2;
  const Eigen::Index left = ref.col - (n - d) / 2;
  if (top < 0 || left < 0 || top + n > padded.height() || left + n > padded.width())
    throw WindowOutOfBounds("block_match: search window outside padded image");

  const Eigen::Index per_axis = n - d + 1;
  const auto ref_block = padded.pix.block(ref.row, ref.col, d, d);

  // (squared distance, row-major candidate index); the index breaks ties.
  std::vector<std::pair<double, Eigen::Index>> candidates;
  candidates.reserve(static_cast<std::size_t>(per_axis * per_axis));
  for (Eigen::Index i = 0; i < per_axis; ++i) {
    for (Eigen::Index j = 0; j < per_axis; ++j) {
      const double dist = (padded.pix.block(top + i, left + j, d, d) - ref_block).squaredNorm();
      candidates.emplace_back(dist, i * per_axis + j);
    }
  }
  std::sort(candidates.begin(), candidates.end());

  const Eigen::Index ref_index = (ref.row - top) * per_axis + (ref.col - left);
  std::vector<PatchCoord> coords;
  coords.reserve(static_cast<std::size_t>(m));
  coords.push_back(ref);  // the reference is always a member of its own group
  for (const auto& [dist, idx] : candidates) {
    if (static_cast<Eigen::Index>(coords.size()) == m) break;
    if (idx == ref_index) continue;
    coords.push_back({top + idx / per_axis, left + idx % per_axis});
  }
  return coords;
}

SimilarityGroup build_group(const image::GrayImage& padded, const std::vector<PatchCoord>& coords,
                            int patch_size) {
  if (coords.empty()) throw InvalidParams("build_group: empty coordinate list");
  Eigen::MatrixXd stack(static_cast<Eigen::Index>(patch_size) * patch_size,
                        static_cast<Eigen::Index>(coords.size()));
  for (std::size_t l = 0; l < coords.size(); ++l)
    stack.col(static_cast<Eigen::Index>(l)) =
        image::extract_patch(padded, coords[l].row, coords[l].col, patch_size).values;
  return group_from_columns(std::move(stack), coords);
}

SimilarityGroup group_from_columns(Eigen::MatrixXd patch_columns, std::vector<PatchCoord> coords) {
  if (patch_columns.cols() == 0) throw InvalidParams("group: no columns");
  if (coords.empty()) {
    coords.resize(static_cast<std::size_t>(patch_columns.cols()));
    for (std::size_t l = 0; l < coords.size(); ++l) coords[l] = {0, static_cast<Eigen::Index>(l)};
  }
  if (static_cast<Eigen::Index>(coords.size()) != patch_columns.cols())
    throw DimensionMismatch("group: coords/columns mismatch");
  SimilarityGroup g;
  g.centroid = patch_columns.rowwise().mean();
  patch_columns.colwise() -= g.centroid;
  g.matrix = std::move(patch_columns);
  g.coords = std::move(coords);
  return g;
}

GroupEstimate denoise_group_pca(const SimilarityGroup& group, double t) {
  if (!(t >= 0.0)) throw InvalidParams("denoise_group: threshold must be >= 0");
  const auto es = linalg::eig_sym(symmetric_gram(group.matrix));
  const auto kept = kept_components(es.eigenvalues, t, group.size());

  Eigen::MatrixXd basis(group.dim(), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t i = 0; i < kept.size(); ++i) basis.col(static_cast<Eigen::Index>(i)) = es.basis.col(kept[i]);

  GroupEstimate est;
  est.patches = basis * (basis.transpose() * group.matrix);
  est.patches.colwise() += group.centroid;
  est.coords = group.coords;
  return est;
}

GroupEstimate denoise_group_svd(const SimilarityGroup& group, double t) {
  if (!(t >= 0.0)) throw InvalidParams("denoise_group: threshold must be >= 0");
  const double tau = t * std::sqrt(static_cast<double>(group.size()));
  GroupEstimate est;
  est.patches = linalg::hard_threshold_svd(group.matrix, tau);
  est.patches.colwise() += group.centroid;
  est.coords = group.coords;
  return est;
}

image::GrayImage denoise_image(const image::GrayImage& noisy, const DenoiseParams& params,
                               int threads) {
  params.validate();
  // The symmetric pad can only reflect up to one image width/height, so the
  // smallest workable image is margin() pixels per side (which also covers
  // the patch-size minimum).
  if (noisy.width() < params.margin() || noisy.height() < params.margin())
    throw ImageTooSmall("denoise_image: image smaller than the matching window support");
  const int workers = threads > 0 ? threads : std::max(1u, std::thread::hardware_concurrency());

  const Eigen::Index margin = params.margin();
  const image::GrayImage padded = image::pad_symmetric(noisy, margin);
  const auto rows = axis_offsets(noisy.height(), params.patch_size, params.stride);
  const auto cols = axis_offsets(noisy.width(), params.patch_size, params.stride);
  const double t = params.threshold();

  image::Accumulator acc(padded.width(), padded.height());
  std::vector<GroupEstimate> row_estimates(cols.size());
  for (const auto grid_row : rows) {
    // Estimates of one grid row are computed in parallel but always folded
    // into the accumulator in grid order, so the reduction order (and the
    // output, bit for bit) does not depend on the worker count.
    parallel_for(static_cast<Eigen::Index>(cols.size()), workers, [&](Eigen::Index j) {
      const PatchCoord ref{grid_row + margin, cols[static_cast<std::size_t>(j)] + margin};
      const auto coords = block_match(padded, ref, params);
      const auto group = build_group(padded, coords, params.patch_size);
      row_estimates[static_cast<std::size_t>(j)] =
          params.path == Path::kPca ? denoise_group_pca(group, t) : denoise_group_svd(group, t);
    });
    for (const auto& est : row_estimates) {
      for (Eigen::Index l = 0; l < est.patches.cols(); ++l)
        acc.add(est.coords[static_cast<std::size_t>(l)].row,
                est.coords[static_cast<std::size_t>(l)].col, est.patches.col(l));
    }
  }
  return acc.cropped(margin).finalize();
}

Eigen::VectorXi ideal_coefficients(const SimilarityGroup& clean_group,
                                   const linalg::EigenSystemXd& basis, double sigma) {
  if (basis.basis.rows() != clean_group.dim() || basis.basis.cols() != clean_group.dim())
    throw DimensionMismatch("ideal_coefficients: basis/group dimension mismatch");
  const double m = static_cast<double>(clean_group.size());
  Eigen::VectorXi mask(clean_group.dim());
  for (Eigen::Index k = 0; k < clean_group.dim(); ++k) {
    const double theta_sq = (basis.basis.col(k).transpose() * clean_group.matrix).squaredNorm() / m;
    mask[k] = theta_sq > sigma * sigma ? 1 : 0;
  }
  return mask;
}

}  // namespace plr::denoise
