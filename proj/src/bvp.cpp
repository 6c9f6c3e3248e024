#include "sunsc/bvp.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "sunsc/random.hpp"

namespace sunsc {

void ShootingProblem::validate() const {
  model.validate();
  const Eigen::Index d = model.n - 1;
  if (w_i.size() != d || wbar_target.size() != d)
    throw DimensionError("boundary data must have n-1 components");
  if (N < 1) throw ValidationError("shooting needs N >= 1");
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw ValidationError("tau must be finite and >= 0");
  if (!(opts.tolerance > 0.0)) throw ValidationError("residual tolerance must be positive");
}

namespace {

struct Trial {
  TrajectorySolution traj;
  Vector residual;
  double norm;
};

Trial shoot(const ShootingProblem& prob, double tau, const Vector& x) {
  Trial t{integrate_ivp(prob.model, prob.N, prob.w_i, x, tau, prob.opts.ivp), {}, 0.0};
  t.residual = t.traj.final().wbar - prob.wbar_target;
  t.norm = t.residual.cwiseAbs().maxCoeff();
  return t;
}

BvpSolution newton(const ShootingProblem& prob, double tau, Vector x) {
  const auto& o = prob.opts;
  Trial cur = [&] {
    try {
      return shoot(prob, tau, x);
    } catch (const IntegrationError& e) {
      std::ostringstream os;
      os << e.what() << " (shooting from wbar(0) = " << x.transpose() << ")";
      throw IntegrationError(os.str(), e.blowup_time());
    }
  }();
  double best = cur.norm;
  int iter = 0;
  while (cur.norm > o.tolerance) {
    if (iter >= o.max_iterations) {
      std::ostringstream os;
      os << "Newton shooting did not converge in " << o.max_iterations
         << " iterations (best residual " << best << ")";
      throw ConvergenceError(os.str(), best);
    }
    const Matrix J = cur.traj.M22();
    const double ratio = normalized_determinant(J);
    if (ratio < o.caustic_threshold) {
      std::ostringstream os;
      os << "caustic: shooting Jacobian M22 is singular (|det|/scale = " << ratio << ")";
      throw CausticError(os.str(), ratio);
    }
    const Vector dx = J.partialPivLu().solve(cur.residual);
    double lambda = 1.0;
    bool accepted = false;
    for (int k = 0; k <= o.max_halvings; ++k, lambda *= 0.5) {
      const Vector trial_x = x - lambda * dx;
      try {
        Trial trial = shoot(prob, tau, trial_x);
        if (trial.norm < cur.norm) {
          x = trial_x;
          cur = std::move(trial);
          accepted = true;
          break;
        }
      } catch (const Error&) {
        // blow-up or singularity on this trial: shorten the step
      }
    }
    ++iter;
    if (!accepted) {
      std::ostringstream os;
      os << "line search stalled after " << o.max_halvings << " halvings (residual " << cur.norm
         << ")";
      throw ConvergenceError(os.str(), best);
    }
    best = std::min(best, cur.norm);
  }
  BvpSolution sol;
  sol.trajectory = std::move(cur.traj);
  sol.wbar0 = std::move(x);
  sol.residual_norm = cur.norm;
  sol.tolerance = o.tolerance;
  sol.newton_iterations = iter;
  sol.continuation_path.emplace_back(tau, sol.wbar0);
  return sol;
}

}  // namespace

BvpSolution solve_shooting(const ShootingProblem& prob, const std::optional<Vector>& initial_guess) {
  prob.validate();
  if (prob.tau == 0.0) return newton(prob, 0.0, prob.wbar_target);
  Vector x = initial_guess ? *initial_guess : Vector(prob.w_i.conjugate());
  if (x.size() != prob.w_i.size()) throw DimensionError("initial guess has the wrong size");
  return newton(prob, prob.tau, std::move(x));
}

BvpSolution solve_with_continuation(const ShootingProblem& prob) {
  prob.validate();
  const auto& o = prob.opts;
  if (prob.tau == 0.0) return newton(prob, 0.0, prob.wbar_target);
  if (!(o.continuation_factor > 1.0) || !(o.continuation_start > 0.0))
    throw ValidationError("continuation needs start > 0 and factor > 1");

  const double tau = prob.tau;
  const double min_step = o.continuation_min_fraction * tau;
  std::vector<std::pair<double, Vector>> path{{0.0, prob.wbar_target}};
  std::optional<BvpSolution> last;
  double next = std::min(tau, o.continuation_start * tau);
  while (true) {
    const auto& [t1, x1] = path.back();
    Vector guess = x1;
    if (path.size() >= 2) {
      const auto& [t0, x0] = path[path.size() - 2];
      guess = x1 + (next - t1) / (t1 - t0) * (x1 - x0);
    }
    try {
      BvpSolution s = newton(prob, next, guess);
      path.emplace_back(next, s.wbar0);
      last = std::move(s);
      if (next >= tau) break;
      next = std::min(tau, next * o.continuation_factor);
    } catch (const Error& e) {
      const double gap = next - path.back().first;
      if (gap / 2.0 < min_step) {
        std::ostringstream os;
        os << "continuation stalled at tau=" << path.back().first << " trying " << next << ": "
           << e.what();
        throw ContinuationError(os.str());
      }
      next = path.back().first + gap / 2.0;
    }
  }
  last->continuation_path.assign(path.begin() + 1, path.end());
  return std::move(*last);
}

std::vector<BvpSolution> solve_multistart(const ShootingProblem& prob, int starts, double radius,
                                          std::uint64_t seed) {
  std::vector<BvpSolution> found;
  auto is_new = [&found](const Vector& x) {
    for (const auto& s : found)
      if ((s.wbar0 - x).cwiseAbs().maxCoeff() <= 1e-6) return false;
    return true;
  };
  try {
    found.push_back(solve_with_continuation(prob));
  } catch (const Error&) {
  }
  const Vector center = prob.w_i.conjugate();
  for (int k = 0; k < starts; ++k) {
    CounterRng rng(seed, static_cast<std::uint64_t>(k));
    Vector dir(center.size());
    for (Eigen::Index i = 0; i < dir.size(); ++i) dir(i) = rng.complex_normal();
    const Vector guess = center + radius * dir / dir.norm();
    try {
      BvpSolution s = solve_shooting(prob, guess);
      if (is_new(s.wbar0)) found.push_back(std::move(s));
    } catch (const Error&) {
    }
  }
  return found;
}

}  // namespace sunsc
