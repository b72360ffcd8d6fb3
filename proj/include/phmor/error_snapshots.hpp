#pragma once

#include "phmor/basis.hpp"
#include "phmor/input_signal.hpp"
#include "phmor/integrators.hpp"
#include "phmor/projection.hpp"
#include "phmor/time_grid.hpp"

namespace phmor {

enum class FomSolver { Auto, Oracle, Midpoint };

namespace detail {

inline Trajectory solve_full(const PHSystem& sys, const InputSignal& u,
                             const TimeGrid& grid, FomSolver solver,
                             Index oracle_limit) {
  switch (solver) {
    case FomSolver::Oracle:
      return solve_expm_oracle(sys, u, grid, oracle_limit);
    case FomSolver::Midpoint:
      return solve_implicit_midpoint(sys, u, grid);
    case FomSolver::Auto:
    default:
      return sys.dim() <= oracle_limit ? solve_expm_oracle(sys, u, grid, oracle_limit)
                                       : solve_implicit_midpoint(sys, u, grid);
  }
}

inline Trajectory solve_reduced(const ReducedPHSystem& rom, const InputSignal& u,
                                const TimeGrid& grid, FomSolver solver,
                                Index oracle_limit) {
  const auto lti = rom.to_lti();
  if (solver == FomSolver::Midpoint) return solve_implicit_midpoint(lti, u, grid);
  return solve_expm_oracle(lti, u, grid, oracle_limit);
}

}  // namespace detail

/// Runs the full and the reduced model over the grid and returns the lifted
/// state mismatch e_k = x(t_k) - V x_r(t_k) as error snapshots. With the
/// default Auto policy both solves use the exponential oracle whenever the
/// full dimension permits, midpoint otherwise.
inline SnapshotSet collect_error_snapshots(const PHSystem& sys,
                                           const ReducedPHSystem& rom,
                                           const InputSignal& u,
                                           const TimeGrid& grid,
                                           FomSolver solver = FomSolver::Auto,
                                           Index oracle_limit = kDefaultOracleLimit) {
  if (rom.full_dim() != sys.dim())
    throw ShapeMismatch("error snapshots: reduced model does not match system");
  FomSolver effective = solver;
  if (solver == FomSolver::Auto)
    effective = sys.dim() <= oracle_limit ? FomSolver::Oracle : FomSolver::Midpoint;

  const Trajectory full = detail::solve_full(sys, u, grid, effective, oracle_limit);
  const Trajectory red = detail::solve_reduced(rom, u, grid, effective, oracle_limit);

  Matrix errors = full.states.transpose() -
                  rom.basis().V * red.states.transpose();
  return SnapshotSet{std::move(errors), SnapshotKind::Error};
}

}  // namespace phmor
