#pragma once

#include "phmor/linalg.hpp"
#include "phmor/ph_system.hpp"

namespace phmor {

/// Mass-spring-damper chain in pH momentum form. State x = (q, p) with
/// displacements q and momenta p, N = 2 n_masses. The first mass is anchored
/// to a wall, the last end is free, every mass carries a damper to ground,
/// and the input forces the first mass:
///   J = [0 I; -I 0],  D = blkdiag(0, c I),  H = blkdiag(K, M^{-1}).
inline PHSystem generate_msd_chain(Index n_masses, double mass, double stiffness,
                                   double damping) {
  if (n_masses < 1) throw InvalidParameter("msd chain: need at least one mass");
  if (!(mass > 0.0)) throw InvalidParameter("msd chain: mass must be positive");
  if (!(stiffness > 0.0)) throw InvalidParameter("msd chain: stiffness must be positive");
  if (damping < 0.0) throw InvalidParameter("msd chain: damping must be nonnegative");

  const Index nm = n_masses;
  const Index N = 2 * nm;

  Matrix K = Matrix::Zero(nm, nm);
  for (Index i = 0; i < nm; ++i) {
    K(i, i) = (i + 1 < nm) ? 2.0 * stiffness : stiffness;
    if (i + 1 < nm) {
      K(i, i + 1) = -stiffness;
      K(i + 1, i) = -stiffness;
    }
  }

  Matrix J = Matrix::Zero(N, N);
  J.topRightCorner(nm, nm) = Matrix::Identity(nm, nm);
  J.bottomLeftCorner(nm, nm) = -Matrix::Identity(nm, nm);

  Matrix D = Matrix::Zero(N, N);
  D.bottomRightCorner(nm, nm) = damping * Matrix::Identity(nm, nm);

  Matrix H = Matrix::Zero(N, N);
  H.topLeftCorner(nm, nm) = K;
  H.bottomRightCorner(nm, nm) = (1.0 / mass) * Matrix::Identity(nm, nm);

  Matrix B = Matrix::Zero(N, 1);
  B(nm, 0) = 1.0;  // force on the first mass (momentum block)

  return PHSystem(J, D, H, B, Vector::Zero(N));
}

}  // namespace phmor
