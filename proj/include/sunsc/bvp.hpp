#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "sunsc/trajectory.hpp"

namespace sunsc {

struct BvpOptions {
  double tolerance = 1e-10;  // sup-norm of wbar(tau) - wbar_target
  int max_iterations = 50;
  int max_halvings = 30;
  double caustic_threshold = 1e-12;
  double continuation_start = 1.0 / 16.0;  // first rung as a fraction of tau
  double continuation_factor = 2.0;
  double continuation_min_fraction = 1e-6;
  IvpOptions ivp;
};

/// w(0) = w_i and wbar(tau) = wbar_target (= conj(w_f)).
struct ShootingProblem {
  HamiltonianModel model;
  int N = 0;
  Vector w_i;
  Vector wbar_target;
  double tau = 0.0;
  BvpOptions opts;

  void validate() const;
};

struct BvpSolution {
  TrajectorySolution trajectory;
  Vector wbar0;
  double residual_norm = 0.0;
  double tolerance = 0.0;
  int newton_iterations = 0;
  std::vector<std::pair<double, Vector>> continuation_path;

  bool converged() const { return residual_norm <= tolerance; }
};

/// Damped Newton on F(x) = wbar(tau; w_i, x) - wbar_target with Jacobian M22.
/// The default guess is conj(w_i).
BvpSolution solve_shooting(const ShootingProblem& prob,
                           const std::optional<Vector>& initial_guess = {});

/// Geometric tau ladder (tau/16, tau/8, ..., tau by default) started from the
/// tau -> 0 limit wbar(0) = wbar_target, each rung warm-started by
/// extrapolating the previous checkpoints. Failed rungs are bisected down to
/// continuation_min_fraction * tau.
BvpSolution solve_with_continuation(const ShootingProblem& prob);

/// The continuation solution followed by every distinct solution found from
/// `starts` random perturbations of radius `radius` around conj(w_i).
/// Solutions closer than 1e-6 in wbar0 are merged.
std::vector<BvpSolution> solve_multistart(const ShootingProblem& prob, int starts = 8,
                                          double radius = 0.5, std::uint64_t seed = 0);

}  // namespace sunsc
