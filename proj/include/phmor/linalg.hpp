#pragma once

#include <Eigen/Dense>

namespace phmor {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Frobenius distance of M from its own transpose: ||M - M^T||_F.
inline double symmetry_defect(const Matrix& m) {
  return (m - m.transpose()).norm();
}

/// Frobenius distance of M from minus its transpose: ||M + M^T||_F.
inline double skewness_defect(const Matrix& m) {
  return (m + m.transpose()).norm();
}

/// Smallest eigenvalue of the symmetric part (M + M^T)/2.
inline double min_symmetric_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace phmor
