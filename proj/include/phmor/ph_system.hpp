#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "phmor/errors.hpp"
#include "phmor/linalg.hpp"

namespace phmor {

struct Tolerances {
  double tol_struct = 1e-10;  // relative, structural residuals
  double tol_psd = 1e-10;     // absolute, on the smallest eigenvalue
};

struct ValidationCheck {
  std::string name;
  bool passed;
  double residual;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const ValidationCheck& c) { return c.passed; });
  }

  const ValidationCheck& check(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return c;
    throw InvalidParameter("no validation check named " + name);
  }
};

namespace detail {

inline Matrix symmetrized_or_throw(const Matrix& m, double tol_struct,
                                   const char* what) {
  const double scale = std::max(1.0, m.norm());
  if (symmetry_defect(m) > tol_struct * scale)
    throw NotSPD(std::string(what) + ": symmetry defect exceeds tolerance");
  return 0.5 * (m + m.transpose());
}

}  // namespace detail

/// Structural checks for the standard-form matrices. Shapes must already be
/// consistent; inconsistent dimensions throw instead of reporting.
inline ValidationReport validate_ph_structure(const Matrix& J, const Matrix& D,
                                              const Matrix& H, const Matrix& B,
                                              const Vector& x0,
                                              const Tolerances& tol = {}) {
  const Index n = H.rows();
  if (H.cols() != n || J.rows() != n || J.cols() != n || D.rows() != n ||
      D.cols() != n || B.rows() != n || x0.size() != n)
    throw ShapeMismatch("pH system matrices have inconsistent dimensions");

  ValidationReport report;
  report.checks.push_back({"shape_consistency", true, 0.0});

  const double j_res = skewness_defect(J);
  report.checks.push_back(
      {"J_skew", j_res <= tol.tol_struct * std::max(1.0, J.norm()), j_res});

  const double d_sym = symmetry_defect(D);
  report.checks.push_back(
      {"D_sym", d_sym <= tol.tol_struct * std::max(1.0, D.norm()), d_sym});

  const double d_min = min_symmetric_eigenvalue(D);
  report.checks.push_back({"D_psd", d_min >= -tol.tol_psd, d_min});

  const double h_sym = symmetry_defect(H);
  bool h_ok = h_sym <= tol.tol_struct * std::max(1.0, H.norm());
  double h_res = h_sym;
  if (h_ok) {
    Eigen::LLT<Matrix> llt(0.5 * (H + H.transpose()));
    h_ok = llt.info() == Eigen::Success;
    if (!h_ok) h_res = min_symmetric_eigenvalue(H);
  }
  report.checks.push_back({"H_spd", h_ok, h_res});

  return report;
}

/// Standard-form linear pH system  x' = (J - D) H x + B u,  y = B^T H x.
/// J is skew-symmetric, D symmetric positive semidefinite, H symmetric
/// positive definite. The Cholesky factor L with H = L L^T is computed at
/// construction and backs all energy-norm evaluations.
class PHSystem {
 public:
  PHSystem(Matrix J, Matrix D, Matrix H, Matrix B, Vector x0,
           Tolerances tol = {})
      : J_(std::move(J)),
        D_(std::move(D)),
        H_(std::move(H)),
        B_(std::move(B)),
        x0_(std::move(x0)),
        tol_(tol) {
    auto report = validate_ph_structure(J_, D_, H_, B_, x0_, tol_);
    if (!report.check("J_skew").passed)
      throw InvalidParameter("J is not skew-symmetric within tolerance");
    if (!report.check("D_sym").passed || !report.check("D_psd").passed)
      throw InvalidParameter("D is not symmetric positive semidefinite");
    if (!report.check("H_spd").passed)
      throw NotSPD("H is not symmetric positive definite");
    // File round-trips break exact symmetry; re-symmetrize inside tolerance.
    D_ = 0.5 * (D_ + D_.transpose());
    H_ = 0.5 * (H_ + H_.transpose());
    J_ = 0.5 * (J_ - J_.transpose());
    h_llt_.compute(H_);
    if (h_llt_.info() != Eigen::Success)
      throw NotSPD("Cholesky factorization of H failed");
  }

  Index dim() const { return H_.rows(); }
  Index n_inputs() const { return B_.cols(); }

  const Matrix& J() const { return J_; }
  const Matrix& D() const { return D_; }
  const Matrix& H() const { return H_; }
  const Matrix& B() const { return B_; }
  const Vector& x0() const { return x0_; }
  const Tolerances& tolerances() const { return tol_; }

  /// Lower-triangular L with H = L L^T.
  Matrix chol_lower() const { return h_llt_.matrixL(); }
  const Eigen::LLT<Matrix>& h_llt() const { return h_llt_; }

  /// L^T x, whose 2-norm is the energy norm of x.
  Vector chol_t_apply(const Vector& x) const {
    return h_llt_.matrixU() * x;
  }

  /// System matrix (J - D) H of the standard form.
  Matrix system_matrix() const { return (J_ - D_) * H_; }

  /// Output y = B^T H x.
  Vector output(const Vector& x) const { return B_.transpose() * (H_ * x); }

  /// Returns a copy with a different initial state.
  PHSystem with_initial_state(Vector x0_new) const {
    PHSystem copy(*this);
    if (x0_new.size() != dim())
      throw ShapeMismatch("initial state has wrong length");
    copy.x0_ = std::move(x0_new);
    return copy;
  }

 private:
  Matrix J_, D_, H_, B_;
  Vector x0_;
  Tolerances tol_;
  Eigen::LLT<Matrix> h_llt_;
};

inline ValidationReport validate_ph_structure(const PHSystem& sys,
                                              const Tolerances& tol = {}) {
  return validate_ph_structure(sys.J(), sys.D(), sys.H(), sys.B(), sys.x0(), tol);
}

/// ||x||_H = sqrt(x^T H x), evaluated as ||L^T x||_2.
inline double energy_norm(const PHSystem& sys, const Vector& x) {
  if (x.size() != sys.dim()) throw ShapeMismatch("energy_norm: wrong vector length");
  return sys.chol_t_apply(x).norm();
}

/// <x, y>_H = x^T H y.
inline double energy_inner(const PHSystem& sys, const Vector& x, const Vector& y) {
  return x.dot(sys.H() * y);
}

/// Induced operator norm ||A||_H = ||H^{1/2} A H^{-1/2}||_2, realized as the
/// largest singular value of L^T A L^{-T} (orthogonally similar conjugation).
inline double energy_operator_norm(const PHSystem& sys, const Matrix& A) {
  if (A.rows() != sys.dim() || A.cols() != sys.dim())
    throw ShapeMismatch("energy_operator_norm: matrix has wrong shape");
  const Matrix L = sys.chol_lower();
  // X = L^T A L^{-T}  <=>  L X^T = A^T L
  Matrix Xt = L.triangularView<Eigen::Lower>().solve(A.transpose() * L);
  Eigen::BDCSVD<Matrix> svd(Xt.transpose());
  return svd.singularValues()(0);
}

/// Hamiltonian (stored energy) 0.5 x^T H x.
inline double hamiltonian(const PHSystem& sys, const Vector& x) {
  return 0.5 * sys.chol_t_apply(x).squaredNorm();
}

/// Descriptor-form pH system  E x~' = (J - D) Q x~ + B u  with the symmetry
/// coupling E^T Q = Q^T E.
class DescriptorPHSystem {
 public:
  DescriptorPHSystem(Matrix E, Matrix Q, Matrix J, Matrix D, Matrix B,
                     Vector x0_tilde, Tolerances tol = {})
      : E_(std::move(E)),
        Q_(std::move(Q)),
        J_(std::move(J)),
        D_(std::move(D)),
        B_(std::move(B)),
        x0_tilde_(std::move(x0_tilde)),
        tol_(tol) {
    const Index n = E_.rows();
    if (E_.cols() != n || Q_.rows() != n || Q_.cols() != n || J_.rows() != n ||
        J_.cols() != n || D_.rows() != n || D_.cols() != n || B_.rows() != n ||
        x0_tilde_.size() != n)
      throw ShapeMismatch("descriptor system matrices have inconsistent dimensions");
    const Matrix EtQ = E_.transpose() * Q_;
    if (symmetry_defect(EtQ) > tol_.tol_struct * std::max(1.0, EtQ.norm()))
      throw InvalidParameter("descriptor system violates E^T Q = Q^T E");
    if (skewness_defect(J_) > tol_.tol_struct * std::max(1.0, J_.norm()))
      throw InvalidParameter("J is not skew-symmetric within tolerance");
    if (symmetry_defect(D_) > tol_.tol_struct * std::max(1.0, D_.norm()) ||
        min_symmetric_eigenvalue(D_) < -tol_.tol_psd)
      throw InvalidParameter("D is not symmetric positive semidefinite");
  }

  Index dim() const { return E_.rows(); }
  const Matrix& E() const { return E_; }
  const Matrix& Q() const { return Q_; }
  const Matrix& J() const { return J_; }
  const Matrix& D() const { return D_; }
  const Matrix& B() const { return B_; }
  const Vector& x0_tilde() const { return x0_tilde_; }
  const Tolerances& tolerances() const { return tol_; }

 private:
  Matrix E_, Q_, J_, D_, B_;
  Vector x0_tilde_;
  Tolerances tol_;
};

/// How the descriptor initial state maps to standard coordinates. The forward
/// state transformation x = E x~ gives x0 = E x0~; InverseMap selects the
/// alternative x0 = E^{-1} x0~ instead.
enum class InitialStateConvention { TransformForward, InverseMap };

/// Change of coordinates x = E x~ turning the descriptor form into a standard
/// pH system with energy matrix H = Q E^{-1} (symmetrized before validation).
inline PHSystem descriptor_to_standard(
    const DescriptorPHSystem& dsys,
    InitialStateConvention convention = InitialStateConvention::TransformForward) {
  const Index n = dsys.dim();
  Eigen::FullPivLU<Matrix> lu(dsys.E());
  if (!lu.isInvertible()) throw SingularE("descriptor matrix E is singular");

  // H = Q E^{-1}, solved as E^T H^T = Q^T.
  Eigen::FullPivLU<Matrix> lut(dsys.E().transpose());
  Matrix H = lut.solve(dsys.Q().transpose()).transpose();
  H = detail::symmetrized_or_throw(H, dsys.tolerances().tol_struct, "H = Q E^{-1}");

  Vector x0(n);
  if (convention == InitialStateConvention::TransformForward)
    x0 = dsys.E() * dsys.x0_tilde();
  else
    x0 = lu.solve(dsys.x0_tilde());

  return PHSystem(dsys.J(), dsys.D(), H, dsys.B(), x0, dsys.tolerances());
}

}  // namespace phmor
