#pragma once

#include <limits>

#include "phmor/input_signal.hpp"
#include "phmor/integrators.hpp"
#include "phmor/ph_system.hpp"
#include "phmor/time_grid.hpp"

namespace phmor {

struct DissipationCheck {
  bool passed;
  double worst_slack;   // max over grid of H(x_k) - H(x_0) - int y^T u dt
  Index worst_index;
};

/// Verifies the energy balance H(x(t_k)) - H(x(t_0)) <= int_{t_0}^{t_k} y^T u dt
/// along a trajectory, with the supplied output y = B^T H x and the same
/// trapezoidal quadrature the error bounds use.
inline DissipationCheck check_dissipation_inequality(const PHSystem& sys,
                                                     const Trajectory& traj,
                                                     const InputSignal& u,
                                                     double slack_tol) {
  if (traj.dim() != sys.dim())
    throw ShapeMismatch("dissipation check: trajectory has wrong state dimension");
  if (u.dim() != sys.n_inputs())
    throw ShapeMismatch("dissipation check: input dimension mismatch");
  if (!u.covers(traj.grid.t_begin(), traj.grid.t_end()))
    throw GridMismatch("dissipation check: input not defined on the grid");

  const Index K = traj.grid.n_points();
  Vector supplied(K);
  Vector energy(K);
  for (Index k = 0; k < K; ++k) {
    const Vector x = traj.state(k);
    supplied[k] = sys.output(x).dot(u(traj.grid.time(k)));
    energy[k] = hamiltonian(sys, x);
  }
  const Vector supplied_integral = integrate_series(traj.grid, supplied);

  DissipationCheck result{true, 0.0, 0};
  result.worst_slack = -std::numeric_limits<double>::infinity();
  for (Index k = 0; k < K; ++k) {
    const double slack = energy[k] - energy[0] - supplied_integral[k];
    if (slack > result.worst_slack) {
      result.worst_slack = slack;
      result.worst_index = k;
    }
  }
  result.passed = result.worst_slack <= slack_tol;
  return result;
}

}  // namespace phmor
