// Independent cross-check constructions used by the tests. Everything here
// bypasses the bound machinery on purpose: results are compared against the
// library, never computed with it.
#pragma once

#include <random>

#include "phmor/basis.hpp"
#include "phmor/integrators.hpp"
#include "phmor/ph_system.hpp"
#include "phmor/projection.hpp"

namespace phmor::testing {

/// Joint IVP for (x_r, e): the reduced state drives the error equation
/// e' = S e + P S V x_r + P B u, so one oracle solve yields the exact error
/// trajectory of the exactly-integrated reduced model.
inline GeneralizedLTI augmented_error_ivp(const PHSystem& sys,
                                          const ReducedPHSystem& rom) {
  const Index N = sys.dim();
  const Index n = rom.dim();
  const Projector proj(sys, rom.basis());

  Matrix M = Matrix::Identity(N + n, N + n);
  M.topLeftCorner(n, n) = rom.Er();

  Matrix A = Matrix::Zero(N + n, N + n);
  A.topLeftCorner(n, n) = rom.Jr() - rom.Dr();
  const Matrix S = sys.system_matrix();
  A.bottomRightCorner(N, N) = S;
  Matrix coupling(N, n);  // P S V, column by column
  for (Index j = 0; j < n; ++j)
    coupling.col(j) = proj.apply(rom.system_times_basis().col(j));
  A.bottomLeftCorner(N, n) = coupling;

  Matrix G = Matrix::Zero(N + n, sys.n_inputs());
  G.topRows(n) = rom.Br();
  for (Index j = 0; j < sys.n_inputs(); ++j)
    G.col(j).tail(N) = proj.apply(sys.B().col(j));

  Vector z0 = Vector::Zero(N + n);
  z0.head(n) = rom.xr0();
  z0.tail(N) = sys.x0() - rom.basis().V * rom.xr0();
  return GeneralizedLTI(std::move(M), std::move(A), std::move(G), std::move(z0));
}

/// Error block of a trajectory produced from augmented_error_ivp.
inline Matrix error_block(const Trajectory& joint, Index full_dim) {
  return joint.states.rightCols(full_dim).transpose();
}

inline Matrix random_matrix(Index rows, Index cols, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss;
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = gauss(rng);
  return m;
}

inline Vector random_vector(Index n, unsigned seed) {
  return random_matrix(n, 1, seed).col(0);
}

/// Random H-orthonormal basis: QR of L^T G mapped back through L^{-T}.
inline Basis random_h_orthonormal_basis(const PHSystem& sys, Index n,
                                        unsigned seed) {
  const Matrix g = random_matrix(sys.dim(), n, seed);
  const Matrix weighted = sys.h_llt().matrixU() * g;
  Eigen::HouseholderQR<Matrix> qr(weighted);
  Matrix q = qr.householderQ() * Matrix::Identity(sys.dim(), n);
  Matrix v = sys.h_llt().matrixU().solve(q);
  return Basis{std::move(v), true};
}

inline PHSystem random_spd_system(Index n, unsigned seed) {
  const Matrix a = random_matrix(n, n, seed);
  Matrix h = a.transpose() * a + static_cast<double>(n) * Matrix::Identity(n, n);
  const Matrix jraw = random_matrix(n, n, seed + 1);
  Matrix j = 0.5 * (jraw - jraw.transpose());
  const Matrix draw = random_matrix(n, n, seed + 2);
  Matrix d = draw.transpose() * draw;
  Matrix b = random_matrix(n, 1, seed + 3);
  return PHSystem(j, d, h, b, Vector::Zero(n));
}

}  // namespace phmor::testing
