#include "plr/verify.hpp"

#include <algorithm>
#include <cmath>

#include "plr/linalg.hpp"
#include "plr/rng.hpp"

namespace plr::verify {

namespace {

// Hook for the negative-control build: compiling with
// PLR_INJECT_THRESHOLD_BUG miscalibrates the threshold fed to one arm of
// each comparison, which the suites must detect.
double checked_threshold(double tau) {
#ifdef PLR_INJECT_THRESHOLD_BUG
  return tau * 1.05;
#else
  return tau;
#endif
}

Eigen::MatrixXd random_matrix(rng::SplitMix& gen, Eigen::Index rows, Eigen::Index cols,
                              double lo, double hi) {
  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) out(r, c) = gen.uniform(lo, hi);
  return out;
}

denoise::SimilarityGroup random_group(rng::SplitMix& gen, Eigen::Index dim, Eigen::Index count) {
  return denoise::group_from_columns(random_matrix(gen, dim, count, 0.0, 255.0));
}

}  // namespace

double variance_identity_error(const denoise::SimilarityGroup& group) {
  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(group.dim(), group.dim());
  scatter.selfadjointView<Eigen::Lower>().rankUpdate(group.matrix);
  const Eigen::MatrixXd scatter_full = scatter.selfadjointView<Eigen::Lower>();
  const auto es = linalg::eig_sym(scatter_full);

  const double m = static_cast<double>(group.size());
  double worst = 0.0;
  for (Eigen::Index k = 0; k < group.dim(); ++k) {
    const double from_columns =
        (es.basis.col(k).transpose() * group.matrix).squaredNorm() / m;
    const double from_spectrum = es.eigenvalues[k] / m;
    const double scale = std::max(std::abs(from_spectrum), 1e-12);
    worst = std::max(worst, std::abs(from_columns - from_spectrum) / scale);
  }
  return worst;
}

SuiteResult eckart_young_suite(int trials, std::uint64_t seed) {
  SuiteResult result{"eckart-young"};
  for (int trial = 0; trial < trials; ++trial) {
    rng::SplitMix gen(rng::split(seed, static_cast<std::uint64_t>(trial)));
    const auto rows = static_cast<Eigen::Index>(2 + gen.below(7));   // 2..8
    const auto cols = rows + static_cast<Eigen::Index>(gen.below(static_cast<std::uint64_t>(13 - rows)));
    const Eigen::MatrixXd y = random_matrix(gen, rows, cols, -10.0, 10.0);
    const auto factored = linalg::svd(y);
    const double top = factored.singular[0];
    if (!(top > 0.0)) {
      ++result.skipped;
      continue;
    }

    bool all_agree = true;
    for (int level = 0; level < 4; ++level) {
      const double tau = gen.uniform(0.05, 1.15) * top;
      // A penalty whose root sits on a singular value makes the minimizer
      // non-unique; such draws prove nothing either way.
      if ((factored.singular.array() - tau).abs().minCoeff() <= 1e-9) {
        ++result.skipped;
        continue;
      }
      const Eigen::MatrixXd shrunk = linalg::hard_threshold_svd(y, checked_threshold(tau));
      const auto oracle = linalg::rank_min_oracle(y, tau * tau);
      if ((shrunk - oracle.minimizer).cwiseAbs().maxCoeff() > 1e-10) all_agree = false;
    }
    ++(all_agree ? result.passed : result.failed);
  }
  return result;
}

SuiteResult path_equivalence_suite(int trials, std::uint64_t seed) {
  SuiteResult result{"path-equivalence"};
  for (int trial = 0; trial < trials; ++trial) {
    rng::SplitMix gen(rng::split(seed, static_cast<std::uint64_t>(trial)));
    const auto group = random_group(gen, 49, 245);
    const double t = 1.5 * gen.uniform(20.0, 70.0);
    const auto pca = denoise::denoise_group_pca(group, checked_threshold(t));
    const auto svd = denoise::denoise_group_svd(group, t);
    const double gap = (pca.patches - svd.patches).cwiseAbs().maxCoeff();
    ++(gap <= 1e-8 ? result.passed : result.failed);
  }
  return result;
}

SuiteResult variance_identity_suite(int trials, std::uint64_t seed) {
  SuiteResult result{"variance-identity"};
  for (int trial = 0; trial < trials; ++trial) {
    rng::SplitMix gen(rng::split(seed, static_cast<std::uint64_t>(trial)));
    const auto group = random_group(gen, 49, 245);
    ++(variance_identity_error(group) <= 1e-8 ? result.passed : result.failed);
  }
  return result;
}

std::vector<SuiteResult> run_all(int trials, std::uint64_t seed) {
  return {eckart_young_suite(trials, seed), path_equivalence_suite(trials / 2, seed + 1),
          variance_identity_suite(trials / 2, seed + 2)};
}

}  // namespace plr::verify
