#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "sunsc/random.hpp"
#include "sunsc/semiclassics.hpp"

using namespace sunsc;

namespace {

Vector scalar(Complex z) {
  Vector v(1);
  v << z;
  return v;
}

double rel_err(Complex a, Complex b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("tau = 0 reproduces the overlap") {
  CounterRng rng(51);
  for (int n = 2; n <= 4; ++n) {
    const auto m = random_model(rng, n);
    const Vector wi = random_vector(rng, n - 1), wf = random_vector(rng, n - 1);
    const auto r = semiclassical_propagator(m, 7, wi, wf, 0.0);
    CHECK(std::abs(r.amplitude - overlap(wf, wi, 7)) < 1e-10);
    CHECK(std::abs(r.amplitude - std::exp(r.log_parts.total())) < 1e-12 * std::abs(r.amplitude));
    CHECK(r.branch_index == 0);
  }
}

TEST_CASE("exact on one-body models") {
  CounterRng rng(52);
  for (int k = 0; k < 20; ++k) {
    const int n = 2 + k % 3;
    const int N = 5 + 5 * (k % 4);
    const auto m = random_one_body_model(rng, n);
    const Vector wi = random_vector(rng, n - 1, 0.6), wf = random_vector(rng, n - 1, 0.6);
    const double tau = 0.2 + 0.1 * k;
    const auto r = semiclassical_propagator(m, N, wi, wf, tau);
    const Complex closed = oracle::one_body_propagator(m.h, N, wi, wf, tau);
    CHECK(rel_err(r.amplitude, closed) <= 1e-6);
    CHECK(std::abs(r.amplitude - std::exp(r.log_parts.total())) < 1e-12 * std::abs(r.amplitude));
    // The Fock sum carries an absolute roundoff floor near 1e-15.
    if (fock_dimension(n, N) <= 500) {
      const Complex fock = exact_propagator(m, FockBasis(n, N), wi, wf, tau);
      CHECK(std::abs(fock - closed) <= 1e-12 * std::abs(closed) + 1e-13);
    }
  }
}

TEST_CASE("correction term agrees with the quadratic-form route") {
  CounterRng rng(53);
  for (int n = 2; n <= 3; ++n) {
    const auto m = random_model(rng, n, 1.0, 0.1);
    ShootingProblem prob{m, 12, random_vector(rng, n - 1, 0.4), random_vector(rng, n - 1, 0.4),
                         0.6, {}};
    const auto sol = solve_with_continuation(prob);
    const auto& t = sol.trajectory;
    CHECK(std::abs(t.correction_integral + 0.5 * t.trace_btilde_integral) < 1e-8);
    const auto r = assemble_propagator(sol, prob.w_i, prob.wbar_target.conjugate(), 12, n);
    CHECK(r.log_parts.iI == t.correction_integral);
  }
}

TEST_CASE("square-root branch past a half turn") {
  const double omega = 2.0, tau = 2.5;  // omega tau > pi
  HamiltonianModel m(2);
  m.h(0, 0) = omega;
  const Vector wi = scalar({0.3, 0.2}), wf = scalar({-0.1, 0.4});
  const auto r = semiclassical_propagator(m, 20, wi, wf, tau);
  const Complex exact = exact_propagator(m, FockBasis(2, 20), wi, wf, tau);
  CHECK(rel_err(r.amplitude, exact) <= 1e-6);
  CHECK(r.branch_index != 0);
}

TEST_CASE("diagnostics and warnings") {
  const auto bh = bose_hubbard_dimer(1.0, 0.2);
  const Vector wi = scalar({0.3, 0.1}), wf = scalar({0.5, -0.2});
  const auto few = semiclassical_propagator(bh, 5, wi, wf, 0.3);
  CHECK(!few.diagnostics.warnings.empty());
  const auto many = semiclassical_propagator(bh, 40, wi, wf, 0.3);
  CHECK(many.diagnostics.warnings.empty());
  CHECK(many.diagnostics.residual <= 1e-10);
  CHECK(many.diagnostics.det_M22_abs > 0.0);
  CHECK(many.diagnostics.liouville_defect < 1e-6);
}

TEST_CASE("assemble_propagator preconditions") {
  const auto bh = bose_hubbard_dimer(1.0, 0.2);
  const Vector wi = scalar({0.3, 0.1}), wf = scalar({0.5, -0.2});
  ShootingProblem prob{bh, 10, wi, wf.conjugate(), 0.3, {}};
  auto sol = solve_with_continuation(prob);
  CHECK_THROWS_AS(assemble_propagator(sol, wi, wf, 11, 2), DimensionError);

  auto unconverged = sol;
  unconverged.residual_norm = 1.0;
  CHECK_THROWS_AS(assemble_propagator(unconverged, wi, wf, 10, 2), ValidationError);

  auto caustic = sol;
  caustic.trajectory.caustic_flag = true;
  CHECK_THROWS_AS(assemble_propagator(caustic, wi, wf, 10, 2), CausticError);
}

TEST_CASE("propagator_vs_exact tables") {
  CounterRng rng(54);
  SUBCASE("H = 0") {
    const HamiltonianModel zero(3);
    const Vector wi = random_vector(rng, 2), wf = random_vector(rng, 2);
    const auto rows = propagator_vs_exact(zero, 6, wi, wf, {0.5, 0.1, 1.0});
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].tau == 0.1);
    CHECK(rows[2].tau == 1.0);
    for (const auto& r : rows) {
      CHECK(r.flags.empty());
      CHECK(r.abs_err <= 1e-12);
    }
  }
  SUBCASE("one-body model, serial and pooled") {
    const auto m = random_one_body_model(rng, 3);
    const Vector wi = random_vector(rng, 2, 0.5), wf = random_vector(rng, 2, 0.5);
    std::vector<double> grid;
    for (int k = 1; k <= 8; ++k) grid.push_back(0.25 * k);
    const auto serial = propagator_vs_exact(m, 10, wi, wf, grid);
    ComparisonOptions pooled;
    pooled.jobs = 3;
    const auto parallel = propagator_vs_exact(m, 10, wi, wf, grid, pooled);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Complex closed = oracle::one_body_propagator(m.h, 10, wi, wf, grid[i]);
      CHECK(rel_err(serial[i].semiclassical, closed) <= 1e-6);
      CHECK(serial[i].abs_err <= 1e-6 * std::abs(serial[i].exact) + 1e-13);
      CHECK(serial[i].semiclassical == parallel[i].semiclassical);
    }
  }
  SUBCASE("failures become flagged rows") {
    const auto bh = bose_hubbard_dimer(1.0, 0.2);
    ComparisonOptions opts;
    opts.bvp.caustic_threshold = 2.0;
    opts.bvp.continuation_min_fraction = 0.1;
    const auto rows = propagator_vs_exact(bh, 10, scalar(0.3), scalar(0.5), {0.2, 0.4}, opts);
    for (const auto& r : rows) {
      CHECK(r.has_exact);
      CHECK(!r.has_semiclassical);
      CHECK(!r.flags.empty());
    }
    ComparisonOptions capped;
    capped.dimension_cap = 5;
    const auto big = propagator_vs_exact(bh, 10, scalar(0.3), scalar(0.5), {0.2}, capped);
    CHECK(!big[0].has_exact);
    CHECK(big[0].has_semiclassical);
    CHECK(!big[0].flags.empty());
  }
}

TEST_CASE("action-Hessian relation") {
  SUBCASE("one-body") {
    CounterRng rng(55);
    const auto m = random_one_body_model(rng, 2);
    ShootingProblem prob{m, 10, random_vector(rng, 1, 0.5), random_vector(rng, 1, 0.5), 0.5, {}};
    const auto sol = solve_with_continuation(prob);
    CHECK(action_hessian_check(prob, sol, 1e-4).discrepancy <= 1e-4);
  }
  SUBCASE("interacting, with central-difference convergence") {
    CounterRng rng(56);
    const auto m = random_model(rng, 3, 1.0, 0.1);
    ShootingProblem prob{m, 10, random_vector(rng, 2, 0.4), random_vector(rng, 2, 0.4), 0.3, {}};
    const auto sol = solve_with_continuation(prob);
    const double coarse = action_hessian_check(prob, sol, 1e-3).discrepancy;
    const double fine = action_hessian_check(prob, sol, 1e-4).discrepancy;
    CHECK(fine <= 1e-4);
    CHECK((fine < 1e-9 || coarse / fine > std::pow(10.0, 1.5)));
  }
  SUBCASE("tau = 0 is excluded") {
    ShootingProblem prob{bose_hubbard_dimer(1.0, 0.2), 10, scalar(0.3), scalar(0.5), 0.0, {}};
    const auto sol = solve_shooting(prob);
    CHECK_THROWS_AS(action_hessian_check(prob, sol, 1e-4), ValidationError);
  }
}
