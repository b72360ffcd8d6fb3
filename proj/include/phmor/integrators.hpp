#pragma once

#include <array>
#include <utility>

#include <Eigen/LU>
#include <unsupported/Eigen/MatrixFunctions>

#include "phmor/input_signal.hpp"
#include "phmor/linalg.hpp"
#include "phmor/ph_system.hpp"
#include "phmor/time_grid.hpp"

namespace phmor {

inline constexpr Index kDefaultOracleLimit = 512;

/// Generalized LTI initial value problem  M z' = A z + G w(t),  z(t0) = z0,
/// with symmetric positive definite mass matrix M. Full systems, reduced
/// systems, and reduced error systems all fit this shape.
struct GeneralizedLTI {
  Matrix M, A, G;
  Vector z0;

  GeneralizedLTI(Matrix mass, Matrix a, Matrix g, Vector z0_in)
      : M(std::move(mass)), A(std::move(a)), G(std::move(g)), z0(std::move(z0_in)) {
    const Index d = M.rows();
    if (M.cols() != d || A.rows() != d || A.cols() != d || G.rows() != d ||
        z0.size() != d)
      throw ShapeMismatch("generalized LTI: inconsistent dimensions");
    Eigen::LLT<Matrix> llt(0.5 * (M + M.transpose()));
    if (llt.info() != Eigen::Success)
      throw NotSPD("generalized LTI: mass matrix is not SPD");
  }

  Index dim() const { return M.rows(); }
  Index n_inputs() const { return G.cols(); }

  static GeneralizedLTI from_ph(const PHSystem& sys) {
    return GeneralizedLTI(Matrix::Identity(sys.dim(), sys.dim()),
                          sys.system_matrix(), sys.B(), sys.x0());
  }
};

namespace detail {

// 5-node Gauss-Legendre rule on [0, 1].
struct GaussRule5 {
  static constexpr std::array<double, 5> nodes = {
      0.5 * (1.0 - 0.9061798459386640), 0.5 * (1.0 - 0.5384693101056831), 0.5,
      0.5 * (1.0 + 0.5384693101056831), 0.5 * (1.0 + 0.9061798459386640)};
  static constexpr std::array<double, 5> weights = {
      0.5 * 0.2369268850561891, 0.5 * 0.4786286704993665, 0.5 * 0.5688888888888889,
      0.5 * 0.4786286704993665, 0.5 * 0.2369268850561891};
};

inline Eigen::FullPivLU<Matrix> factor_step_matrix(const GeneralizedLTI& sys,
                                                   double dt) {
  Eigen::FullPivLU<Matrix> lu(sys.M - (0.5 * dt) * sys.A);
  if (!lu.isInvertible())
    throw SingularStep("implicit midpoint: step matrix is singular");
  return lu;
}

}  // namespace detail

/// Implicit midpoint rule with fixed step. The step matrix M - (dt/2) A is
/// factorized once; the input is sampled at interval midpoints, which keeps
/// the scheme second-order accurate.
inline Trajectory solve_implicit_midpoint(const GeneralizedLTI& sys,
                                          const InputSignal& w,
                                          const TimeGrid& grid) {
  if (w.dim() != sys.n_inputs())
    throw ShapeMismatch("implicit midpoint: input dimension mismatch");
  if (!w.covers(grid.t_begin(), grid.t_end()))
    throw GridMismatch("implicit midpoint: input not defined on the grid");

  const double dt = grid.dt();
  const auto lu = detail::factor_step_matrix(sys, dt);
  const Matrix plus = sys.M + (0.5 * dt) * sys.A;

  Matrix states(grid.n_points(), sys.dim());
  Vector z = sys.z0;
  states.row(0) = z.transpose();
  const bool forced = !w.is_zero();
  for (Index k = 0; k < grid.n_steps(); ++k) {
    Vector rhs = plus * z;
    if (forced) rhs += dt * (sys.G * w(grid.midpoint_time(k)));
    z = lu.solve(rhs);
    states.row(k + 1) = z.transpose();
  }
  return Trajectory(grid, std::move(states));
}

/// Implicit midpoint with precomputed forcing samples: column k of
/// `midpoint_forcing` is G w evaluated at the midpoint of step k (already
/// multiplied by G, i.e. it must have sys.dim() rows).
inline Trajectory solve_implicit_midpoint(const GeneralizedLTI& sys,
                                          const Matrix& midpoint_forcing,
                                          const TimeGrid& grid) {
  if (midpoint_forcing.rows() != sys.dim() ||
      midpoint_forcing.cols() != grid.n_steps())
    throw ShapeMismatch("implicit midpoint: forcing sample shape mismatch");

  const double dt = grid.dt();
  const auto lu = detail::factor_step_matrix(sys, dt);
  const Matrix plus = sys.M + (0.5 * dt) * sys.A;

  Matrix states(grid.n_points(), sys.dim());
  Vector z = sys.z0;
  states.row(0) = z.transpose();
  for (Index k = 0; k < grid.n_steps(); ++k) {
    z = lu.solve(plus * z + dt * midpoint_forcing.col(k));
    states.row(k + 1) = z.transpose();
  }
  return Trajectory(grid, std::move(states));
}

/// Exact-solution oracle via the dense matrix exponential. States propagate
/// step by step as
///   z_{k+1} = exp(S dt) z_k + sum_i w_i exp(S (dt - tau_i)) G u(t_k + tau_i)
/// with S = M^{-1} A and a 5-node Gauss rule for the per-step convolution, so
/// the cost stays linear in the number of steps.
inline Trajectory solve_expm_oracle(const GeneralizedLTI& sys,
                                    const InputSignal& w, const TimeGrid& grid,
                                    Index oracle_limit = kDefaultOracleLimit) {
  if (sys.dim() > oracle_limit)
    throw OracleTooLarge("matrix exponential oracle limited to dimension " +
                         std::to_string(oracle_limit));
  if (w.dim() != sys.n_inputs())
    throw ShapeMismatch("oracle: input dimension mismatch");
  if (!w.covers(grid.t_begin(), grid.t_end()))
    throw GridMismatch("oracle: input not defined on the grid");

  const double dt = grid.dt();
  Eigen::LLT<Matrix> mass(0.5 * (sys.M + sys.M.transpose()));
  const Matrix S = mass.solve(sys.A);
  const Matrix Ghat = mass.solve(sys.G);

  const Matrix step = (S * dt).exp();

  using Rule = detail::GaussRule5;
  std::array<Matrix, 5> kernel;  // w_i * exp(S (dt - tau_i)) * Ghat
  const bool forced = !w.is_zero();
  if (forced) {
    for (std::size_t i = 0; i < Rule::nodes.size(); ++i) {
      const double tau = Rule::nodes[i] * dt;
      kernel[i] = (dt * Rule::weights[i]) * ((S * (dt - tau)).exp() * Ghat);
    }
  }

  Matrix states(grid.n_points(), sys.dim());
  Vector z = sys.z0;
  states.row(0) = z.transpose();
  for (Index k = 0; k < grid.n_steps(); ++k) {
    const double tk = grid.time(k);
    Vector next = step * z;
    if (forced)
      for (std::size_t i = 0; i < Rule::nodes.size(); ++i)
        next += kernel[i] * w(tk + Rule::nodes[i] * dt);
    z = next;
    states.row(k + 1) = z.transpose();
  }
  return Trajectory(grid, std::move(states));
}

inline Trajectory solve_expm_oracle(const PHSystem& sys, const InputSignal& u,
                                    const TimeGrid& grid,
                                    Index oracle_limit = kDefaultOracleLimit) {
  return solve_expm_oracle(GeneralizedLTI::from_ph(sys), u, grid, oracle_limit);
}

inline Trajectory solve_implicit_midpoint(const PHSystem& sys,
                                          const InputSignal& u,
                                          const TimeGrid& grid) {
  return solve_implicit_midpoint(GeneralizedLTI::from_ph(sys), u, grid);
}

/// Cumulative composite trapezoidal rule; output[k] approximates the integral
/// of the sampled function from t_0 to t_k. Negative samples are flagged via
/// `had_negative` (bound integrands are norms and should not go below zero).
inline Vector integrate_series(const TimeGrid& grid, const Vector& values,
                               bool* had_negative = nullptr) {
  if (values.size() != grid.n_points())
    throw ShapeMismatch("integrate_series: sample count does not match grid");
  if (!values.allFinite())
    throw InvalidParameter("integrate_series: non-finite sample");
  if (had_negative) *had_negative = values.minCoeff() < 0.0;

  const double dt = grid.dt();
  Vector out(values.size());
  out[0] = 0.0;
  for (Index k = 0; k + 1 < values.size(); ++k)
    out[k + 1] = out[k] + 0.5 * dt * (values[k] + values[k + 1]);
  return out;
}

}  // namespace phmor
