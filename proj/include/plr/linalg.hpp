#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "plr/errors.hpp"

// Dense decompositions for the small matrices this project works with
// (typically 49x49 Gram matrices and 49x245 patch stacks). The symmetric
// eigensolver is a cyclic Jacobi iteration: at these sizes it is fast and
// delivers basis orthogonality near machine precision, which the
// hard-threshold filters and the rank oracle rely on.
namespace plr::linalg {

template <class Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Orthonormal eigenbasis and eigenvalues (descending) of a symmetric matrix.
template <class Scalar>
struct EigenSystem {
  MatrixX<Scalar> basis;        // eigenvectors as columns
  VectorX<Scalar> eigenvalues;  // sorted descending
};

/// Thin SVD of an r x c matrix with r <= c.
template <class Scalar>
struct Svd {
  MatrixX<Scalar> left;      // r x r, orthonormal columns
  VectorX<Scalar> singular;  // length r, nonnegative, descending
  MatrixX<Scalar> right_t;   // r x c; row k is the k-th right singular vector
};

/// Result of the brute-force rank-penalized minimization.
template <class Scalar>
struct RankMinimizer {
  MatrixX<Scalar> minimizer;
  Scalar objective;
  Eigen::Index rank;
};

using EigenSystemXd = EigenSystem<double>;
using SvdXd = Svd<double>;
using RankMinimizerXd = RankMinimizer<double>;

inline constexpr int kJacobiMaxSweeps = 100;

namespace detail {

// Deterministic sign convention: the largest-magnitude entry of every column
// is made positive; magnitude ties resolve to the first such entry.
template <class Scalar>
void fix_column_signs(MatrixX<Scalar>& basis) {
  for (Eigen::Index j = 0; j < basis.cols(); ++j) {
    Eigen::Index imax = 0;
    Scalar amax = std::abs(basis(0, j));
    for (Eigen::Index i = 1; i < basis.rows(); ++i) {
      const Scalar a = std::abs(basis(i, j));
      if (a > amax) {
        amax = a;
        imax = i;
      }
    }
    if (basis(imax, j) < Scalar(0)) basis.col(j) = -basis.col(j);
  }
}

template <class Scalar>
Scalar off_diagonal_norm(const MatrixX<Scalar>& a) {
  // Summing the off-diagonal entries directly avoids the catastrophic
  // cancellation of squaredNorm() - diagonal().squaredNorm() near
  // convergence, which would stop the sweeps three orders of magnitude
  // short of the intended tolerance.
  MatrixX<Scalar> off = a;
  off.diagonal().setZero();
  return off.norm();
}

}  // namespace detail

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi sweeps.
/// Converges when the off-diagonal Frobenius norm drops below 1e-12 times
/// the matrix norm, or after kJacobiMaxSweeps sweeps.
template <class Derived>
EigenSystem<typename Derived::Scalar> eig_sym(const Eigen::MatrixBase<Derived>& input) {
  using Scalar = typename Derived::Scalar;
  MatrixX<Scalar> a = input;
  const Eigen::Index n = a.rows();
  if (n == 0 || n != a.cols()) throw ShapeError("eig_sym: matrix must be square and non-empty");
  if (n > 256) throw ShapeError("eig_sym: matrix side exceeds 256");
  if (!a.allFinite()) throw NonFinite("eig_sym: non-finite entry");
  if (n > 1 && (a - MatrixX<Scalar>(a.transpose())).cwiseAbs().maxCoeff() > Scalar(1e-9))
    throw NonSymmetric("eig_sym: asymmetry beyond 1e-9");

  MatrixX<Scalar> w = (a + MatrixX<Scalar>(a.transpose())) / Scalar(2);
  MatrixX<Scalar> v = MatrixX<Scalar>::Identity(n, n);
  const Scalar off_tol = Scalar(1e-12) * w.norm();
  for (int sweep = 0; sweep < kJacobiMaxSweeps; ++sweep) {
    if (detail::off_diagonal_norm(w) <= off_tol) break;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        Eigen::JacobiRotation<Scalar> rot;
        if (rot.makeJacobi(w, p, q)) {
          w.applyOnTheLeft(p, q, rot.adjoint());
          w.applyOnTheRight(p, q, rot);
          v.applyOnTheRight(p, q, rot);
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&w](Eigen::Index i, Eigen::Index j) { return w(i, i) > w(j, j); });

  EigenSystem<Scalar> out;
  out.basis.resize(n, n);
  out.eigenvalues.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    Scalar ev = w(order[k], order[k]);
    if (ev < Scalar(0) && ev >= Scalar(-1e-10)) ev = Scalar(0);  // roundoff
    out.eigenvalues[k] = ev;
    out.basis.col(k) = v.col(order[k]);
  }
  detail::fix_column_signs(out.basis);
  return out;
}

/// SVD of a wide matrix (rows <= cols), derived from the eigendecomposition
/// of input * input^T so that `left` matches eig_sym's basis, sign rule
/// included. Right singular vectors of numerically-zero singular values are
/// left as zero rows.
template <class Derived>
Svd<typename Derived::Scalar> svd(const Eigen::MatrixBase<Derived>& input) {
  using Scalar = typename Derived::Scalar;
  MatrixX<Scalar> a = input;
  if (a.rows() > a.cols()) throw ShapeError("svd: expects rows <= cols");
  if (!a.allFinite()) throw NonFinite("svd: non-finite entry");

  const Eigen::Index r = a.rows();
  MatrixX<Scalar> gram = MatrixX<Scalar>::Zero(r, r);
  gram.template selfadjointView<Eigen::Lower>().rankUpdate(a);
  const MatrixX<Scalar> gram_full = gram.template selfadjointView<Eigen::Lower>();
  EigenSystem<Scalar> es = eig_sym(gram_full);

  Svd<Scalar> out;
  out.left = std::move(es.basis);
  out.singular = es.eigenvalues.cwiseMax(Scalar(0)).cwiseSqrt();
  out.right_t = MatrixX<Scalar>::Zero(r, a.cols());
  const Scalar cutoff = Scalar(1e-9) * out.singular[0];
  for (Eigen::Index k = 0; k < r; ++k) {
    if (out.singular[k] > cutoff)
      out.right_t.row(k) = (out.left.col(k).transpose() * a) / out.singular[k];
  }
  return out;
}

/// Keeps singular values strictly above tau, zeroes the rest, reassembles.
/// Exact ties shrink to zero.
template <class Derived>
MatrixX<typename Derived::Scalar> hard_threshold_svd(const Eigen::MatrixBase<Derived>& input,
                                                     typename Derived::Scalar tau) {
  using Scalar = typename Derived::Scalar;
  if (!(tau >= Scalar(0))) throw InvalidParams("hard_threshold_svd: threshold must be >= 0");
  const Svd<Scalar> f = svd(input);
  const VectorX<Scalar> shrunk =
      (f.singular.array() > tau).select(f.singular.array(), Scalar(0)).matrix();
  return f.left * shrunk.asDiagonal() * f.right_t;
}

/// Brute-force minimizer of ||y - x||_F^2 + mu * rank(x) over all ranks:
/// every rank-r SVD truncation is formed and its objective evaluated
/// directly. Ties resolve to the smallest rank. Intended as an independent
/// check of the hard-threshold filter, hence the small-size limit.
template <class Derived>
RankMinimizer<typename Derived::Scalar> rank_min_oracle(const Eigen::MatrixBase<Derived>& input,
                                                        typename Derived::Scalar mu) {
  using Scalar = typename Derived::Scalar;
  if (!(mu > Scalar(0))) throw InvalidParams("rank_min_oracle: mu must be positive");
  MatrixX<Scalar> y = input;
  if (y.rows() > 16 || y.cols() > 16) throw ShapeError("rank_min_oracle: enumeration limited to 16x16");
  if (!y.allFinite()) throw NonFinite("rank_min_oracle: non-finite entry");

  const bool flipped = y.rows() > y.cols();
  const MatrixX<Scalar> w = flipped ? MatrixX<Scalar>(y.transpose()) : y;
  const Svd<Scalar> f = svd(w);

  RankMinimizer<Scalar> best{MatrixX<Scalar>::Zero(w.rows(), w.cols()), w.squaredNorm(), 0};
  for (Eigen::Index rank = 1; rank <= w.rows(); ++rank) {
    MatrixX<Scalar> truncated =
        f.left.leftCols(rank) * f.singular.head(rank).asDiagonal() * f.right_t.topRows(rank);
    const Scalar objective = (w - truncated).squaredNorm() + mu * Scalar(rank);
    if (objective < best.objective) best = {std::move(truncated), objective, rank};
  }
  if (flipped) best.minimizer = MatrixX<Scalar>(best.minimizer.transpose());
  return best;
}

}  // namespace plr::linalg
