#pragma once

#include <cmath>
#include <utility>

#include <Eigen/Cholesky>

#include "phmor/basis.hpp"
#include "phmor/errors.hpp"
#include "phmor/integrators.hpp"
#include "phmor/linalg.hpp"
#include "phmor/ph_system.hpp"

namespace phmor {

/// Petrov-Galerkin reduction with test space H V: left-multiplying the
/// approximated dynamics by V^T H keeps the reduced blocks pH-structured,
///   E_r x_r' = (J_r - D_r) x_r + B_r u,   x_r(t0) = V^T H x0,
/// with E_r = V^T H V, J_r = V^T H J H V, D_r = V^T H D H V, B_r = V^T H B.
/// Cached alongside: W = H V and SV = (J - D) H V for residual evaluation.
class ReducedPHSystem {
 public:
  ReducedPHSystem(Matrix Er, Matrix Jr, Matrix Dr, Matrix Br, Vector xr0,
                  Basis basis, Matrix W, Matrix SV, const PHSystem* parent)
      : Er_(std::move(Er)),
        Jr_(std::move(Jr)),
        Dr_(std::move(Dr)),
        Br_(std::move(Br)),
        xr0_(std::move(xr0)),
        basis_(std::move(basis)),
        W_(std::move(W)),
        SV_(std::move(SV)),
        parent_(parent) {
    const Index n = Er_.rows();
    const double sq = std::sqrt(static_cast<double>(n));
    if (skewness_defect(Jr_) > 1e-10 * std::max(1.0, Jr_.norm()))
      throw StructureLost("reduced J lost skew-symmetry");
    if (min_symmetric_eigenvalue(Dr_) < -1e-10)
      throw StructureLost("reduced D lost positive semidefiniteness");
    er_llt_.compute(0.5 * (Er_ + Er_.transpose()));
    if (er_llt_.info() != Eigen::Success)
      throw StructureLost("reduced mass matrix is not SPD");
    if (basis_.h_orthonormal &&
        (Er_ - Matrix::Identity(n, n)).norm() > 1e-10 * sq)
      throw StructureLost("H-orthonormal basis but V^T H V deviates from identity");
    // Tie the stored blocks exactly to their structure.
    Jr_ = 0.5 * (Jr_ - Jr_.transpose());
    Dr_ = 0.5 * (Dr_ + Dr_.transpose());
    Er_ = 0.5 * (Er_ + Er_.transpose());
  }

  Index dim() const { return Er_.rows(); }
  Index full_dim() const { return basis_.dim(); }
  Index n_inputs() const { return Br_.cols(); }

  const Matrix& Er() const { return Er_; }
  const Matrix& Jr() const { return Jr_; }
  const Matrix& Dr() const { return Dr_; }
  const Matrix& Br() const { return Br_; }
  const Vector& xr0() const { return xr0_; }
  const Basis& basis() const { return basis_; }
  const PHSystem& parent() const { return *parent_; }

  /// W = H V.
  const Matrix& weighted_basis() const { return W_; }
  /// SV = (J - D) H V.
  const Matrix& system_times_basis() const { return SV_; }
  const Eigen::LLT<Matrix>& gram_llt() const { return er_llt_; }

  GeneralizedLTI to_lti() const {
    return GeneralizedLTI(Er_, Jr_ - Dr_, Br_, xr0_);
  }

 private:
  Matrix Er_, Jr_, Dr_, Br_;
  Vector xr0_;
  Basis basis_;
  Matrix W_, SV_;
  const PHSystem* parent_;
  Eigen::LLT<Matrix> er_llt_;
};

/// Assembles the pH-preserving reduced system for the given basis. The parent
/// system must outlive the returned object.
inline ReducedPHSystem reduce(const PHSystem& sys, const Basis& basis) {
  if (basis.dim() != sys.dim())
    throw ShapeMismatch("reduce: basis rows do not match system dimension");
  if (basis.size() < 1 || basis.size() > sys.dim())
    throw RankDeficientBasis("reduce: basis width out of range");

  const Matrix& V = basis.V;
  Matrix W = sys.H() * V;
  Matrix Er = V.transpose() * W;
  Matrix Jr = W.transpose() * (sys.J() * W);
  Matrix Dr = W.transpose() * (sys.D() * W);
  Matrix Br = W.transpose() * sys.B();
  Vector xr0 = W.transpose() * sys.x0();
  Matrix SV = (sys.J() - sys.D()) * W;
  return ReducedPHSystem(std::move(Er), std::move(Jr), std::move(Dr),
                         std::move(Br), std::move(xr0), basis, std::move(W),
                         std::move(SV), &sys);
}

inline Vector lift(const ReducedPHSystem& rom, const Vector& xr) {
  if (xr.size() != rom.dim()) throw ShapeMismatch("lift: wrong reduced length");
  return rom.basis().V * xr;
}

/// Lifts a whole reduced trajectory back to full coordinates.
inline Trajectory lift(const ReducedPHSystem& rom, const Trajectory& traj) {
  if (traj.dim() != rom.dim()) throw ShapeMismatch("lift: wrong reduced width");
  return Trajectory(traj.grid, traj.states * rom.basis().V.transpose());
}

/// H-orthogonal projector P = I - V (V^T H V)^{-1} V^T H onto the complement
/// of span(V), applied matrix-free. For H-orthonormal bases the Gram solve
/// collapses to the identity.
class Projector {
 public:
  Projector(const PHSystem& sys, const Basis& basis)
      : V_(basis.V), W_(sys.H() * basis.V) {
    const Matrix gram = V_.transpose() * W_;
    identity_gram_ = basis.h_orthonormal &&
                     (gram - Matrix::Identity(gram.rows(), gram.cols())).norm() <=
                         1e-10 * std::sqrt(static_cast<double>(gram.rows()));
    if (!identity_gram_) {
      gram_llt_.compute(0.5 * (gram + gram.transpose()));
      if (gram_llt_.info() != Eigen::Success)
        throw SingularGram("projector: V^T H V is not invertible");
    }
  }

  explicit Projector(const ReducedPHSystem& rom)
      : Projector(rom.parent(), rom.basis()) {}

  Vector apply(const Vector& x) const {
    if (x.size() != V_.rows()) throw ShapeMismatch("projector: wrong vector length");
    Vector coeff = W_.transpose() * x;
    if (!identity_gram_) coeff = gram_llt_.solve(coeff);
    return x - V_ * coeff;
  }

 private:
  Matrix V_, W_;
  bool identity_gram_ = false;
  Eigen::LLT<Matrix> gram_llt_;
};

inline Vector apply_projector(const Projector& p, const Vector& x) {
  return p.apply(x);
}

/// Reduced model of the error dynamics e' = (J - D) H e + r(t): the same
/// pH-preserving reduction in the secondary basis, but the input port carries
/// the full-order residual, B_r = V_A^T H, and the reduced initial error is
/// zero.
inline ReducedPHSystem reduced_error_system(const PHSystem& sys,
                                            const Basis& alp_basis) {
  if (alp_basis.dim() != sys.dim())
    throw ShapeMismatch("reduced error system: basis rows mismatch");
  const Matrix& V = alp_basis.V;
  Matrix W = sys.H() * V;
  Matrix Er = V.transpose() * W;
  Matrix Jr = W.transpose() * (sys.J() * W);
  Matrix Dr = W.transpose() * (sys.D() * W);
  Matrix Br = W.transpose();  // forcing term is V_A^T H r(t)
  Vector xr0 = Vector::Zero(V.cols());
  Matrix SV = (sys.J() - sys.D()) * W;
  return ReducedPHSystem(std::move(Er), std::move(Jr), std::move(Dr),
                         std::move(Br), std::move(xr0), alp_basis, std::move(W),
                         std::move(SV), &sys);
}

}  // namespace phmor
