#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "phmor/dissipation.hpp"
#include "phmor/integrators.hpp"
#include "phmor/models.hpp"
#include "support/test_oracles.hpp"

using namespace phmor;

TEST_CASE("midpoint: no dynamics means a constant trajectory") {
  GeneralizedLTI sys(Matrix::Identity(3, 3), Matrix::Zero(3, 3),
                     Matrix::Identity(3, 3).col(0), Vector::Ones(3));
  const auto traj =
      solve_implicit_midpoint(sys, InputSignal::zero(1), TimeGrid(0, 1, 10));
  for (Index k = 0; k < traj.grid.n_points(); ++k)
    CHECK((traj.state(k) - Vector::Ones(3)).norm() == 0.0);
}

TEST_CASE("midpoint: scalar decay step has its closed form") {
  GeneralizedLTI sys(Matrix::Identity(1, 1), -Matrix::Identity(1, 1),
                     Matrix::Identity(1, 1), Vector::Ones(1));
  const auto traj =
      solve_implicit_midpoint(sys, InputSignal::zero(1), TimeGrid(0, 0.1, 1));
  CHECK_THAT(traj.states(1, 0),
             Catch::Matchers::WithinRel((1.0 - 0.05) / (1.0 + 0.05), 1e-15));
}

TEST_CASE("midpoint: second order on an undamped oscillator period") {
  const PHSystem osc = generate_msd_chain(1, 1.0, 1.0, 0.0);
  const double period = 2.0 * std::numbers::pi;
  Vector x0(2);
  x0 << 1.0, 0.0;
  const PHSystem sys = osc.with_initial_state(x0);

  auto end_error = [&](Index steps) {
    const auto traj = solve_implicit_midpoint(sys, InputSignal::zero(1),
                                              TimeGrid(0, period, steps));
    return (traj.state(traj.grid.n_steps()) - x0).norm();
  };
  const double e1 = end_error(200);
  const double e2 = end_error(400);
  const double ratio = e1 / e2;
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.5);
}

TEST_CASE("oracle: pure decay per coordinate") {
  Vector v(3);
  v << 1.0, -2.0, 0.5;
  PHSystem sys(Matrix::Zero(3, 3), Matrix::Identity(3, 3), Matrix::Identity(3, 3),
               Matrix::Identity(3, 3).col(0), v);
  const TimeGrid grid(0, 2, 20);
  const auto traj = solve_expm_oracle(sys, InputSignal::zero(1), grid);
  for (Index k = 0; k < grid.n_points(); ++k) {
    const Vector expected = std::exp(-grid.time(k)) * v;
    CHECK((traj.state(k) - expected).norm() < 1e-13);
  }
}

TEST_CASE("oracle: conservative flow is an H-isometry") {
  const PHSystem chain = generate_msd_chain(8, 1.0, 2.0, 0.0);
  Vector x0 = testing::random_vector(16, 9);
  const PHSystem sys = chain.with_initial_state(x0);
  const auto traj =
      solve_expm_oracle(sys, InputSignal::zero(1), TimeGrid(0, 5, 100));
  const double h0 = hamiltonian(sys, x0);
  for (Index k = 0; k < traj.grid.n_points(); ++k)
    CHECK_THAT(hamiltonian(sys, traj.state(k)),
               Catch::Matchers::WithinRel(h0, 1e-10));
}

TEST_CASE("midpoint converges to the oracle at second order") {
  const PHSystem chain = generate_msd_chain(2, 1.0, 1.0, 0.3);
  const InputSignal u = InputSignal::sinusoid(1.0, 0.25);
  const double T = 4.0;

  auto max_error = [&](Index steps) {
    const TimeGrid grid(0, T, steps);
    const auto exact = solve_expm_oracle(chain, u, grid);
    const auto approx = solve_implicit_midpoint(chain, u, grid);
    double worst = 0.0;
    for (Index k = 0; k < grid.n_points(); ++k)
      worst = std::max(worst,
                       (exact.state(k) - approx.state(k)).norm());
    return worst;
  };
  const double e1 = max_error(100);
  const double e2 = max_error(200);
  CHECK(e1 / e2 > 3.5);
  CHECK(e1 / e2 < 4.5);
}

TEST_CASE("oracle respects its size limit") {
  const PHSystem chain = generate_msd_chain(8, 1.0, 1.0, 0.1);
  CHECK_THROWS_AS(
      solve_expm_oracle(chain, InputSignal::zero(1), TimeGrid(0, 1, 10), 8),
      OracleTooLarge);
}

TEST_CASE("integrate_series basics") {
  const TimeGrid grid(0, 1, 10);
  SECTION("zero integrand") {
    const Vector out = integrate_series(grid, Vector::Zero(11));
    CHECK(out.norm() == 0.0);
  }
  SECTION("constant integrand") {
    const Vector out = integrate_series(grid, Vector::Ones(11));
    for (Index k = 0; k <= 10; ++k)
      CHECK_THAT(out[k], Catch::Matchers::WithinAbs(0.1 * k, 1e-15));
  }
  SECTION("linear integrand is integrated exactly") {
    Vector v(11);
    for (Index k = 0; k <= 10; ++k) v[k] = grid.time(k);
    const Vector out = integrate_series(grid, v);
    CHECK_THAT(out[10], Catch::Matchers::WithinRel(0.5, 1e-14));
  }
  SECTION("negative values raise the warning flag") {
    Vector v = Vector::Ones(11);
    v[3] = -1.0;
    bool negative = false;
    integrate_series(grid, v, &negative);
    CHECK(negative);
  }
  SECTION("monotone for nonnegative input") {
    Vector v = testing::random_vector(11, 77).cwiseAbs();
    const Vector out = integrate_series(grid, v);
    for (Index k = 0; k + 1 <= 10; ++k) CHECK(out[k + 1] >= out[k]);
  }
}

TEST_CASE("error IVP solved by the oracle matches direct subtraction") {
  const PHSystem chain = generate_msd_chain(10, 1.0, 4.0, 0.2);
  const InputSignal u = InputSignal::sinusoid(1.0, 0.4);
  const TimeGrid grid(0, 3, 300);

  const auto x = solve_expm_oracle(chain, u, grid);
  const SnapshotSet snaps = snapshots_from_trajectory(x);
  const Basis basis = pod_state(snaps, chain, 4);
  const ReducedPHSystem rom = reduce(chain, basis);

  // Route 1: x and the exactly-integrated reduced model, subtracted.
  const auto xr = solve_expm_oracle(rom.to_lti(), u, grid);
  Matrix direct = x.states.transpose() - basis.V * xr.states.transpose();

  // Route 2: the joint reduced-state/error IVP via the same oracle.
  const auto joint =
      solve_expm_oracle(testing::augmented_error_ivp(chain, rom), u, grid,
                        kDefaultOracleLimit);
  const Matrix via_ivp = testing::error_block(joint, chain.dim());

  double scale = 0.0;
  for (Index k = 0; k < grid.n_points(); ++k)
    scale = std::max(scale, direct.col(k).norm());
  REQUIRE(scale > 0.0);
  CHECK((direct - via_ivp).colwise().norm().maxCoeff() <= 1e-8 * scale);
}

TEST_CASE("dissipation inequality on oracle trajectories") {
  SECTION("damped chain with sinusoid input") {
    const PHSystem chain = generate_msd_chain(12, 1.0, 9.0, 0.4);
    Vector x0 = Vector::Zero(24);
    x0[0] = 0.1;  // stretch the first spring
    const PHSystem sys = chain.with_initial_state(x0);
    const InputSignal u = InputSignal::sinusoid(1.0, 0.5);
    const TimeGrid grid(0, 4, 800);
    const auto traj = solve_expm_oracle(sys, u, grid);
    const double h0 = hamiltonian(sys, x0);
    const auto check =
        check_dissipation_inequality(sys, traj, u, 1e-8 * h0);
    CHECK(check.passed);
  }
  SECTION("undamped unforced flow conserves energy") {
    const PHSystem chain = generate_msd_chain(12, 1.0, 9.0, 0.0);
    Vector x0 = testing::random_vector(24, 31);
    const PHSystem sys = chain.with_initial_state(x0);
    const TimeGrid grid(0, 4, 400);
    const auto traj = solve_expm_oracle(sys, InputSignal::zero(1), grid);
    const double h0 = hamiltonian(sys, x0);
    for (Index k = 0; k < grid.n_points(); ++k)
      CHECK_THAT(hamiltonian(sys, traj.state(k)),
                 Catch::Matchers::WithinRel(h0, 1e-10));
  }
}

TEST_CASE("tabulated input must cover the grid") {
  GeneralizedLTI sys(Matrix::Identity(1, 1), -Matrix::Identity(1, 1),
                     Matrix::Identity(1, 1), Vector::Ones(1));
  Matrix vals(3, 1);
  vals << 0.0, 1.0, 0.0;
  const auto u = InputSignal::tabulated({0.0, 0.5, 1.0}, vals);
  CHECK_THROWS_AS(solve_implicit_midpoint(sys, u, TimeGrid(0, 2, 10)),
                  GridMismatch);
  CHECK_NOTHROW(solve_implicit_midpoint(sys, u, TimeGrid(0, 1, 10)));
}
