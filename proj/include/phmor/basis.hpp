#pragma once

#include <cmath>
#include <utility>

#include <Eigen/SVD>

#include "phmor/errors.hpp"
#include "phmor/linalg.hpp"
#include "phmor/ph_system.hpp"
#include "phmor/time_grid.hpp"

namespace phmor {

enum class SnapshotKind { State, Error };

/// Snapshot matrix; each column is one state (or error) sample.
struct SnapshotSet {
  Matrix data;
  SnapshotKind kind = SnapshotKind::State;

  Index dim() const { return data.rows(); }
  Index count() const { return data.cols(); }
};

inline SnapshotSet snapshots_from_trajectory(const Trajectory& traj,
                                             SnapshotKind kind = SnapshotKind::State) {
  return SnapshotSet{traj.states.transpose(), kind};
}

/// Reduction basis V together with the weighting it was built under.
struct Basis {
  Matrix V;
  bool h_orthonormal = false;

  Index dim() const { return V.rows(); }
  Index size() const { return V.cols(); }
};

namespace detail {

// Deterministic sign fix: the largest-magnitude entry of each column of the
// weighted mode matrix is made positive (first index wins ties).
inline void fix_column_signs(Matrix& U) {
  for (Index j = 0; j < U.cols(); ++j) {
    Index imax = 0;
    U.col(j).cwiseAbs().maxCoeff(&imax);
    if (U(imax, j) < 0.0) U.col(j) = -U.col(j);
  }
}

struct WeightedSvd {
  Matrix modes;  // left singular vectors of L^T X, sign-fixed
  Vector singular_values;
};

inline WeightedSvd weighted_svd(const SnapshotSet& snaps, const PHSystem& sys) {
  if (snaps.dim() != sys.dim())
    throw ShapeMismatch("pod: snapshot dimension does not match system");
  if (snaps.count() < 1) throw InvalidParameter("pod: empty snapshot set");
  if (!snaps.data.allFinite())
    throw InvalidParameter("pod: non-finite snapshot entry");

  const Matrix weighted = sys.h_llt().matrixU() * snaps.data;  // L^T X
  Eigen::BDCSVD<Matrix> svd(weighted, Eigen::ComputeThinU);
  WeightedSvd out{svd.matrixU(), svd.singularValues()};
  fix_column_signs(out.modes);
  return out;
}

inline Basis basis_from_modes(const WeightedSvd& svd, const PHSystem& sys,
                              Index n) {
  const double cutoff = 1e-14 * svd.singular_values(0);
  Index rank = 0;
  while (rank < svd.singular_values.size() && svd.singular_values(rank) > cutoff)
    ++rank;
  if (n > rank)
    throw RankDeficient("pod: requested " + std::to_string(n) +
                        " modes but numerical rank is " + std::to_string(rank));
  // V = L^{-T} U keeps V^T H V = U^T U = I.
  Matrix V = sys.h_llt().matrixU().solve(svd.modes.leftCols(n));
  return Basis{std::move(V), true};
}

}  // namespace detail

/// Energy-weighted POD: thin SVD of L^T X, modes mapped back through L^{-T}.
/// The returned basis is H-orthonormal with modes ordered by decreasing
/// captured energy.
inline Basis pod_state(const SnapshotSet& snaps, const PHSystem& sys, Index n) {
  if (n < 1) throw InvalidParameter("pod: basis size must be positive");
  if (n > std::min(snaps.dim(), snaps.count()))
    throw RankDeficient("pod: " + std::to_string(n) +
                        " modes requested from " + std::to_string(snaps.count()) +
                        " snapshots of dimension " + std::to_string(snaps.dim()));
  return detail::basis_from_modes(detail::weighted_svd(snaps, sys), sys, n);
}

/// Singular values of the weighted snapshot matrix L^T X (all of them).
inline Vector pod_singular_values(const SnapshotSet& snaps, const PHSystem& sys) {
  return detail::weighted_svd(snaps, sys).singular_values;
}

/// Number of singular values above rel_cutoff times the largest.
inline Index pod_numerical_rank(const SnapshotSet& snaps, const PHSystem& sys,
                                double rel_cutoff = 1e-12) {
  const Vector sv = pod_singular_values(snaps, sys);
  const double cutoff = rel_cutoff * sv(0);
  Index rank = 0;
  while (rank < sv.size() && sv(rank) > cutoff) ++rank;
  return rank;
}

/// Grows `base` to n_total modes from the same snapshot set. The leading
/// base.size() columns of the result are base's columns verbatim, so prefix
/// nesting holds bitwise.
inline Basis extend_hierarchical(const Basis& base, const SnapshotSet& snaps,
                                 const PHSystem& sys, Index n_total) {
  if (n_total <= base.size())
    throw InvalidParameter("hierarchical extension requires n_total > base size");
  const auto svd = detail::weighted_svd(snaps, sys);
  Basis full = detail::basis_from_modes(svd, sys, n_total);

  const Matrix prefix = full.V.leftCols(base.size());
  const double mismatch = (prefix - base.V).norm();
  if (mismatch > 1e-12 * std::max(1.0, base.V.norm()))
    throw NotNested("base is not the POD prefix of this snapshot set");

  Basis out{Matrix(sys.dim(), n_total), true};
  out.V.leftCols(base.size()) = base.V;
  out.V.rightCols(n_total - base.size()) = full.V.rightCols(n_total - base.size());
  return out;
}

/// ALP basis: POD of error snapshots.
inline Basis alp_basis_from_errors(const SnapshotSet& err_snaps,
                                   const PHSystem& sys, Index n) {
  if (err_snaps.kind != SnapshotKind::Error)
    throw InvalidParameter("alp basis expects error snapshots");
  return pod_state(err_snaps, sys, n);
}

/// Wraps an explicitly assembled basis matrix: checks full column rank in the
/// weighted geometry and measures H-orthonormality.
inline Basis make_basis(Matrix V, const PHSystem& sys) {
  if (V.rows() != sys.dim()) throw ShapeMismatch("basis rows do not match system");
  if (V.cols() < 1 || V.cols() > sys.dim())
    throw InvalidParameter("basis width out of range");
  const Matrix weighted = sys.h_llt().matrixU() * V;
  Eigen::BDCSVD<Matrix> svd(weighted);
  const Vector sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 1e-12 * sv(0))
    throw RankDeficientBasis("basis is numerically rank deficient");
  const Matrix gram = weighted.transpose() * weighted;
  const double defect =
      (gram - Matrix::Identity(V.cols(), V.cols())).norm();
  const bool orthonormal = defect <= 1e-10 * std::sqrt(static_cast<double>(V.cols()));
  return Basis{std::move(V), orthonormal};
}

}  // namespace phmor
