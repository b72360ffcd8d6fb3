#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "phmor/error_snapshots.hpp"
#include "phmor/input_signal.hpp"
#include "phmor/integrators.hpp"
#include "phmor/projection.hpp"
#include "phmor/time_grid.hpp"

namespace phmor {

enum class BoundKind { Standard, Alp, Hierarchical, TrueError, Effectivity, Component };

/// One scalar series per grid point: an error bound, the true error, an
/// effectivity, or a bound component.
struct BoundSeries {
  TimeGrid grid;
  Vector values;
  BoundKind kind;
  std::string label;
  Index n_primal = 0;
  Index n_secondary = 0;
  double exp_constant = 1.0;
  double decay_rate = 0.0;
};

enum class ResidualKind { Primal, Alp, Hierarchical };

struct ResidualSeries {
  TimeGrid grid;
  Vector norms;  // ||r(t_k)||_H per grid point
  ResidualKind which;
};

namespace detail {

inline void require_same_grid(const TimeGrid& a, const TimeGrid& b,
                              const char* what) {
  if (!(a == b)) throw GridMismatch(std::string(what) + ": grids differ");
}

inline Vector h_norms_of_columns(const PHSystem& sys, const Matrix& cols) {
  Vector norms(cols.cols());
  const Matrix weighted = sys.h_llt().matrixU() * cols;
  for (Index k = 0; k < cols.cols(); ++k) norms[k] = weighted.col(k).norm();
  return norms;
}

}  // namespace detail

/// Residual vectors of the lifted reduced trajectory at the grid nodes, in the
/// projected form r(t_k) = P [ (J - D) H V x_r(t_k) + B u(t_k) ] that avoids
/// differentiating the discrete trajectory. Column k is r(t_k).
inline Matrix primal_residual_vectors(const PHSystem& sys,
                                      const ReducedPHSystem& rom,
                                      const Trajectory& rom_traj,
                                      const InputSignal& u) {
  if (rom_traj.dim() != rom.dim())
    throw ShapeMismatch("residual: trajectory does not match reduced model");
  if (u.dim() != sys.n_inputs())
    throw ShapeMismatch("residual: input dimension mismatch");
  if (!u.covers(rom_traj.grid.t_begin(), rom_traj.grid.t_end()))
    throw GridMismatch("residual: input not defined on the grid");

  const Projector proj(sys, rom.basis());
  const Index K = rom_traj.grid.n_points();
  Matrix r(sys.dim(), K);
  for (Index k = 0; k < K; ++k) {
    Vector w = rom.system_times_basis() * rom_traj.state(k) +
               sys.B() * u(rom_traj.grid.time(k));
    r.col(k) = proj.apply(w);
  }
  return r;
}

/// Discrete midpoint residual of the reduced trajectory on step k:
///   r(t_{k+1/2}) = (J-D) H V x_mid + B u(t_{k+1/2}) - V (x_{k+1} - x_k)/dt.
/// By the midpoint update this is H-orthogonal to span(V) to roundoff, and it
/// is exactly the forcing that makes the reduced error solve reproduce the
/// hierarchical state difference when the bases coincide.
inline Matrix midpoint_residual_vectors(const PHSystem& sys,
                                        const ReducedPHSystem& rom,
                                        const Trajectory& rom_traj,
                                        const InputSignal& u) {
  const TimeGrid& grid = rom_traj.grid;
  const double dt = grid.dt();
  Matrix r(sys.dim(), grid.n_steps());
  for (Index k = 0; k < grid.n_steps(); ++k) {
    const Vector xk = rom_traj.state(k);
    const Vector xk1 = rom_traj.state(k + 1);
    const Vector xmid = 0.5 * (xk + xk1);
    Vector w = rom.system_times_basis() * xmid +
               sys.B() * u(grid.midpoint_time(k)) -
               rom.basis().V * ((xk1 - xk) / dt);
    r.col(k) = w;
  }
  return r;
}

/// ||r(t_k)||_H of the primal residual along a reduced trajectory.
inline ResidualSeries primal_residual_norms(const PHSystem& sys,
                                            const ReducedPHSystem& rom,
                                            const Trajectory& rom_traj,
                                            const InputSignal& u) {
  const Matrix r = primal_residual_vectors(sys, rom, rom_traj, u);
  return ResidualSeries{rom_traj.grid, detail::h_norms_of_columns(sys, r),
                        ResidualKind::Primal};
}

enum class LogNormMode { UnitBound, SharpEig };

/// Exponential constant for the bound kernel. The skew part of the dynamics
/// drops out of the logarithmic norm, which leaves lambda_max(-L^T D L) <= 0,
/// hence C_exp = 1. SharpEig additionally reports the decay rate
/// mu = lambda_min(L^T D L) >= 0 for the optional sharper kernel
/// exp(-mu (t - s)).
struct LogNormConstant {
  double c_exp;
  double decay_rate;
};

inline LogNormConstant log_norm_constant(const PHSystem& sys,
                                         LogNormMode mode = LogNormMode::UnitBound) {
  if (mode == LogNormMode::UnitBound) return {1.0, 0.0};
  const Matrix L = sys.chol_lower();
  const Matrix M = L.transpose() * sys.D() * L;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (M + M.transpose()),
                                           Eigen::EigenvaluesOnly);
  return {1.0, std::max(0.0, es.eigenvalues().minCoeff())};
}

/// Standard residual bound: the running integral of the residual energy norm.
/// With decay_rate > 0 the integrand carries the lag kernel exp(-mu (t - s)),
/// evaluated by an exact trapezoidal recursion; decay_rate 0 is the plain
/// unit-constant bound.
inline BoundSeries standard_bound(const ResidualSeries& res,
                                  double decay_rate = 0.0) {
  if (res.norms.minCoeff() < 0.0)
    throw InvalidParameter("standard bound: negative residual norm");
  BoundSeries out{res.grid, Vector(res.norms.size()), BoundKind::Standard,
                  "standard_bound"};
  out.decay_rate = decay_rate;
  if (decay_rate == 0.0) {
    out.values = integrate_series(res.grid, res.norms);
    return out;
  }
  const double dt = res.grid.dt();
  const double damp = std::exp(-decay_rate * dt);
  out.values[0] = 0.0;
  for (Index k = 0; k + 1 < res.norms.size(); ++k)
    out.values[k + 1] =
        damp * (out.values[k] + 0.5 * dt * res.norms[k]) + 0.5 * dt * res.norms[k + 1];
  return out;
}

struct BoundWithComponents {
  BoundSeries bound;
  BoundSeries state_component;     // ||e_hat||_H resp. fine-to-coarse difference
  BoundSeries residual_component;  // running integral of the second-level residual
};

/// Auxiliary-linear-problem bound: reduce the error dynamics in the secondary
/// basis, lift the approximate error, and add the integral of the second
/// residual:  Delta_A(t) = ||e_hat(t)||_H + int ||r_A||_H ds.
///
/// The reduced error solve is forced by the discrete midpoint residual of the
/// primal trajectory, so the whole construction degenerates to the
/// hierarchical bound when both use the same basis.
inline BoundWithComponents alp_bound(const PHSystem& sys,
                                     const ReducedPHSystem& rom,
                                     const ReducedPHSystem& alp_rom,
                                     const InputSignal& u, const TimeGrid& grid,
                                     const Trajectory* rom_traj = nullptr) {
  if (&alp_rom.parent() != &sys || &rom.parent() != &sys)
    throw InvalidParameter("alp bound: reduced models built from another system");

  Trajectory xr = rom_traj ? *rom_traj
                           : solve_implicit_midpoint(rom.to_lti(), u, grid);
  detail::require_same_grid(xr.grid, grid, "alp bound");

  const Matrix r_nodes = primal_residual_vectors(sys, rom, xr, u);
  const Matrix r_mid = midpoint_residual_vectors(sys, rom, xr, u);

  // Forcing samples for the reduced error system: V_A^T H r at midpoints.
  const Matrix forcing = alp_rom.weighted_basis().transpose() * r_mid;
  GeneralizedLTI err_lti(alp_rom.Er(), alp_rom.Jr() - alp_rom.Dr(),
                         Matrix::Identity(alp_rom.dim(), alp_rom.dim()),
                         alp_rom.xr0());
  const Trajectory er = solve_implicit_midpoint(err_lti, forcing, grid);

  const Index K = grid.n_points();
  const Projector proj_alp(sys, alp_rom.basis());
  Vector approx_err_norm(K);
  Matrix r_alp(sys.dim(), K);
  for (Index k = 0; k < K; ++k) {
    const Vector er_k = er.state(k);
    approx_err_norm[k] = energy_norm(sys, alp_rom.basis().V * er_k);
    r_alp.col(k) =
        proj_alp.apply(alp_rom.system_times_basis() * er_k + r_nodes.col(k));
  }

  BoundWithComponents out{
      {grid, Vector(K), BoundKind::Alp, "alp_bound", rom.dim(), alp_rom.dim()},
      {grid, approx_err_norm, BoundKind::Component, "alp_approx_error_norm",
       rom.dim(), alp_rom.dim()},
      {grid, integrate_series(grid, detail::h_norms_of_columns(sys, r_alp)),
       BoundKind::Component, "alp_residual_integral", rom.dim(), alp_rom.dim()}};
  out.bound.values = out.state_component.values + out.residual_component.values;
  return out;
}

/// Hierarchical bound from a finer reduced model whose basis extends the
/// primal one:  Delta_H(t) = ||x_H(t) - x_hat(t)||_H + int ||r_H||_H ds.
inline BoundWithComponents hierarchical_bound(const PHSystem& sys,
                                              const ReducedPHSystem& rom,
                                              const ReducedPHSystem& hier_rom,
                                              const InputSignal& u,
                                              const TimeGrid& grid,
                                              const Trajectory* rom_traj = nullptr,
                                              const Trajectory* hier_traj = nullptr) {
  if (&hier_rom.parent() != &sys || &rom.parent() != &sys)
    throw InvalidParameter("hierarchical bound: reduced models built from another system");
  if (hier_rom.dim() <= rom.dim())
    throw InvalidParameter("hierarchical bound: secondary basis must be larger");
  const Index n = rom.dim();
  const double prefix_gap =
      (hier_rom.basis().V.leftCols(n) - rom.basis().V).norm();
  if (prefix_gap > 1e-12 * std::max(1.0, rom.basis().V.norm()))
    throw NotPrefix("hierarchical basis does not extend the primal basis");

  Trajectory xr = rom_traj ? *rom_traj
                           : solve_implicit_midpoint(rom.to_lti(), u, grid);
  Trajectory xh = hier_traj ? *hier_traj
                            : solve_implicit_midpoint(hier_rom.to_lti(), u, grid);
  detail::require_same_grid(xr.grid, grid, "hierarchical bound");
  detail::require_same_grid(xh.grid, grid, "hierarchical bound");

  const Matrix r_h = primal_residual_vectors(sys, hier_rom, xh, u);

  const Index K = grid.n_points();
  Vector diff_norm(K);
  for (Index k = 0; k < K; ++k) {
    const Vector diff =
        hier_rom.basis().V * xh.state(k) - rom.basis().V * xr.state(k);
    diff_norm[k] = energy_norm(sys, diff);
  }

  BoundWithComponents out{
      {grid, Vector(K), BoundKind::Hierarchical, "hier_bound", rom.dim(),
       hier_rom.dim()},
      {grid, diff_norm, BoundKind::Component, "hier_state_difference", rom.dim(),
       hier_rom.dim()},
      {grid, integrate_series(grid, detail::h_norms_of_columns(sys, r_h)),
       BoundKind::Component, "hier_residual_integral", rom.dim(), hier_rom.dim()}};
  out.bound.values = out.state_component.values + out.residual_component.values;
  return out;
}

/// ||x(t_k) - V x_r(t_k)||_H with the full solution from the requested solver.
/// A precomputed full trajectory can be passed to avoid re-solving.
inline BoundSeries true_error_series(const PHSystem& sys,
                                     const ReducedPHSystem& rom,
                                     const InputSignal& u, const TimeGrid& grid,
                                     FomSolver fom_solver = FomSolver::Oracle,
                                     const Trajectory* rom_traj = nullptr,
                                     Index oracle_limit = kDefaultOracleLimit,
                                     const Trajectory* fom_traj = nullptr) {
  const Trajectory x = fom_traj
                           ? *fom_traj
                           : detail::solve_full(sys, u, grid, fom_solver, oracle_limit);
  detail::require_same_grid(x.grid, grid, "true error");
  Trajectory xr = rom_traj ? *rom_traj
                           : solve_implicit_midpoint(rom.to_lti(), u, grid);
  detail::require_same_grid(xr.grid, grid, "true error");

  const Index K = grid.n_points();
  Vector values(K);
  for (Index k = 0; k < K; ++k)
    values[k] = energy_norm(sys, x.state(k) - rom.basis().V * xr.state(k));
  return BoundSeries{grid, std::move(values), BoundKind::TrueError, "true_error",
                     rom.dim()};
}

struct EffectivityResult {
  BoundSeries series;  // bound / true error; skipped points hold 0
  double max_effectivity;
  std::vector<Index> skipped;  // grid indices with true error below the floor
};

/// Pointwise effectivity bound(t_k) / error(t_k). Points where the true error
/// falls below `floor` are excluded from the maximum and reported.
inline EffectivityResult effectivity(const BoundSeries& bound,
                                     const BoundSeries& true_err, double floor) {
  detail::require_same_grid(bound.grid, true_err.grid, "effectivity");
  if (!(floor > 0.0)) throw InvalidParameter("effectivity: floor must be positive");

  const Index K = bound.values.size();
  EffectivityResult out{
      {bound.grid, Vector::Zero(K), BoundKind::Effectivity,
       "eff_" + bound.label, bound.n_primal, bound.n_secondary},
      0.0,
      {}};
  bool any = false;
  for (Index k = 0; k < K; ++k) {
    if (true_err.values[k] < floor) {
      out.skipped.push_back(k);
      continue;
    }
    const double eff = bound.values[k] / true_err.values[k];
    out.series.values[k] = eff;
    out.max_effectivity = any ? std::max(out.max_effectivity, eff) : eff;
    any = true;
  }
  if (!any) throw AllPointsSkipped("effectivity: every point is below the floor");
  return out;
}

/// Numerical certificate that the ALP and hierarchical bounds coincide when
/// both secondary reductions use the same extended basis [V V_plus] and the
/// reduced-error initial condition matches the reduced-state mismatch at t0.
struct Prop1Report {
  bool precondition_met;          // initial-value condition of the equivalence
  double ic_defect;               // || x_Hr(0) - [x_r(0); 0] ||
  bool secondary_h_orthonormal;   // sufficient property 1
  bool x0_in_primal_span;         // sufficient property 2
  bool x0_zero;                   // sufficient property 3
  double max_abs_deviation;
  double max_rel_deviation;
  bool passed;  // deviation within tolerance whenever the precondition holds
  BoundSeries delta_alp;
  BoundSeries delta_hier;
};

inline Prop1Report certify_prop1(const PHSystem& sys, const Basis& primal,
                                 const Matrix& v_plus, const InputSignal& u,
                                 const TimeGrid& grid, double rel_tol = 1e-8) {
  if (v_plus.rows() != sys.dim() || v_plus.cols() < 1)
    throw ShapeMismatch("prop1: extension block has wrong shape");
  Matrix combined(sys.dim(), primal.size() + v_plus.cols());
  combined.leftCols(primal.size()) = primal.V;
  combined.rightCols(v_plus.cols()) = v_plus;
  const Basis secondary = make_basis(std::move(combined), sys);

  const ReducedPHSystem rom = reduce(sys, primal);
  const ReducedPHSystem hier_rom = reduce(sys, secondary);
  const ReducedPHSystem alp_rom = reduced_error_system(sys, secondary);

  const Trajectory xr = solve_implicit_midpoint(rom.to_lti(), u, grid);
  auto alp = alp_bound(sys, rom, alp_rom, u, grid, &xr);
  auto hier = hierarchical_bound(sys, rom, hier_rom, u, grid, &xr);

  Prop1Report report{};
  Vector d0 = hier_rom.xr0();
  d0.head(rom.dim()) -= rom.xr0();
  report.ic_defect = d0.norm();
  report.precondition_met =
      report.ic_defect <= 1e-10 * std::max(1.0, hier_rom.xr0().norm());

  report.secondary_h_orthonormal = secondary.h_orthonormal;
  report.x0_zero = sys.x0().norm() == 0.0;
  if (report.x0_zero) {
    report.x0_in_primal_span = true;
  } else {
    const Projector proj(sys, primal);
    report.x0_in_primal_span =
        energy_norm(sys, proj.apply(sys.x0())) <= 1e-10 * energy_norm(sys, sys.x0());
  }

  const Vector dev = (alp.bound.values - hier.bound.values).cwiseAbs();
  report.max_abs_deviation = dev.maxCoeff();
  const double scale = alp.bound.values.maxCoeff();
  report.max_rel_deviation =
      scale > 0.0 ? report.max_abs_deviation / scale : report.max_abs_deviation;
  report.passed =
      !report.precondition_met || report.max_rel_deviation <= rel_tol;
  report.delta_alp = std::move(alp.bound);
  report.delta_hier = std::move(hier.bound);
  return report;
}

}  // namespace phmor
