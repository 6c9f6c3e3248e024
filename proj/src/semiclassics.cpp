#include "sunsc/semiclassics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

#include "sunsc/fock.hpp"

namespace sunsc {

namespace {

constexpr double kPi = std::numbers::pi;

// iSc = action integral + (N/2)[Log(1 + wbar(0).w_i) + Log(1 + w_f*.w(tau))],
// with the second logarithm continued from the first along the path.
Complex classical_action(const TrajectorySolution& traj, const Vector& w_i,
                         const Vector& wbar_target, const Vector& wbar0) {
  const double N = traj.N;
  const Complex log_D0 = std::log(1.0 + bdot(wbar0, w_i));
  const auto& end = traj.final();
  const Complex D_tau = end.denominator();
  const Complex log_D_tau =
      log_D0 + traj.log_D_increment + std::log(1.0 + bdot(Vector(wbar_target - end.wbar), end.w) / D_tau);
  return traj.action_integral + N / 2.0 * (log_D0 + log_D_tau);
}

}  // namespace

PropagatorResult assemble_propagator(const BvpSolution& sol, const Vector& w_i, const Vector& w_f,
                                     int N, int n) {
  if (!sol.converged())
    throw ValidationError("assemble_propagator needs a converged shooting solution");
  const auto& traj = sol.trajectory;
  if (traj.N != N || traj.n != n) throw DimensionError("solution was computed for another (N, n)");
  if (traj.caustic_flag) {
    std::ostringstream os;
    os << "propagator is singular at a caustic (|det M22|/scale = " << traj.det_M22_ratio
       << "); perturb tau";
    throw CausticError(os.str(), traj.det_M22_ratio);
  }
  PropagatorResult r;
  const Vector wbar_target = w_f.conjugate();
  r.log_parts.iSc = classical_action(traj, w_i, wbar_target, sol.wbar0);
  r.log_parts.iI = traj.correction_integral;
  r.log_parts.norm_term =
      -0.5 * N * (std::log1p(w_f.squaredNorm()) + std::log1p(w_i.squaredNorm()));
  const Complex log_bracket = 0.5 * n * traj.log_D_increment - traj.log_det_M22;
  r.log_parts.half_log_det = 0.5 * log_bracket;
  r.amplitude = std::exp(r.log_parts.total());
  const double principal_half = 0.5 * std::arg(std::exp(log_bracket));
  r.branch_index =
      static_cast<int>(std::lround((r.log_parts.half_log_det.imag() - principal_half) / kPi));

  auto& dg = r.diagnostics;
  dg.det_M22_abs = std::abs(traj.M22().determinant());
  dg.det_M22_ratio = traj.det_M22_ratio;
  dg.residual = sol.residual_norm;
  dg.energy_drift = traj.energy_drift;
  dg.liouville_defect = traj.liouville_defect();
  dg.newton_iterations = sol.newton_iterations;
  if (N < 10 * n) {
    std::ostringstream os;
    os << "N=" << N << " < 10n: the finite-N measure prefactor (N+n-1)!/(N! N^(n-1)) is "
       << "omitted and the approximation may be poor";
    dg.warnings.push_back(os.str());
  }
  if (traj.singularity_flag) dg.warnings.push_back("trajectory passed close to 1 + wbar.w = 0");
  if (traj.sqrt_branch_flips > 0) dg.warnings.push_back("sqrt(1 + wbar.w) changed branch");
  return r;
}

PropagatorResult semiclassical_propagator(const HamiltonianModel& model, int N, const Vector& w_i,
                                          const Vector& w_f, double tau, const BvpOptions& opts) {
  ShootingProblem prob{model, N, w_i, w_f.conjugate(), tau, opts};
  return assemble_propagator(solve_with_continuation(prob), w_i, w_f, N, model.n);
}

namespace {

Complex with_half_log_det(PropagatorResult& r, Complex half_log_det) {
  const Complex shift = half_log_det - r.log_parts.half_log_det;
  r.log_parts.half_log_det = half_log_det;
  r.branch_index += static_cast<int>(std::lround(shift.imag() / kPi));
  r.amplitude = std::exp(r.log_parts.total());
  return r.amplitude;
}

// Im(half_log_det) of `next` moved by a multiple of pi to lie within pi/2 of
// `prev`; returns false when no representative is that close.
bool unwrap_against(double prev, Complex& next) {
  const double k = std::round((prev - next.imag()) / kPi);
  next += Complex(0.0, k * kPi);
  return std::abs(next.imag() - prev) < kPi / 2;
}

}  // namespace

std::vector<ComparisonRow> propagator_vs_exact(const HamiltonianModel& model, int N,
                                               const Vector& w_i, const Vector& w_f,
                                               std::vector<double> tau_grid,
                                               const ComparisonOptions& opts) {
  std::sort(tau_grid.begin(), tau_grid.end());
  std::vector<ComparisonRow> rows(tau_grid.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].tau = tau_grid[i];

  std::optional<ExactPropagator> exact;
  if (opts.exact) {
    try {
      exact.emplace(model, FockBasis(model.n, N, opts.dimension_cap));
    } catch (const Error& e) {
      for (auto& row : rows) row.flags.push_back(std::string("exact_failed: ") + e.what());
    }
  }

  auto compute = [&](std::size_t i) {
    auto& row = rows[i];
    if (exact) {
      row.exact = (*exact)(w_i, w_f, row.tau);
      row.has_exact = true;
    }
    if (!opts.semiclassical) return;
    try {
      row.result = semiclassical_propagator(model, N, w_i, w_f, row.tau, opts.bvp);
      row.semiclassical = row.result.amplitude;
      row.has_semiclassical = true;
    } catch (const CausticError& e) {
      row.flags.push_back(std::string("caustic: ") + e.what());
    } catch (const ContinuationError& e) {
      row.flags.push_back(std::string("bvp_failed: ") + e.what());
    } catch (const Error& e) {
      row.flags.push_back(std::string("sc_failed: ") + e.what());
    }
  };

  const int jobs = std::max(1, std::min<int>(opts.jobs, static_cast<int>(rows.size())));
  if (jobs == 1) {
    for (std::size_t i = 0; i < rows.size(); ++i) compute(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < rows.size(); i = next++) compute(i);
      });
    for (auto& t : pool) t.join();
  }

  // Ordered branch pass over ascending tau, starting from the tau -> 0 limit
  // where the bracket is 1 and its root is +1.
  double prev_tau = 0.0;
  double prev_im = 0.0;
  for (auto& row : rows) {
    if (!row.has_semiclassical) continue;
    Complex h = row.result.log_parts.half_log_det;
    if (!unwrap_against(prev_im, h)) {
      // Walk a refined ladder between the two rows to carry the branch.
      bool tracked = false;
      for (int level = 1; level <= opts.branch_refinements && !tracked; ++level) {
        const int pieces = 1 << level;
        double im = prev_im;
        bool ok = true;
        for (int k = 1; k < pieces && ok; ++k) {
          const double t = prev_tau + (row.tau - prev_tau) * k / pieces;
          try {
            Complex mid =
                semiclassical_propagator(model, N, w_i, w_f, t, opts.bvp).log_parts.half_log_det;
            ok = unwrap_against(im, mid);
            im = mid.imag();
          } catch (const Error&) {
            ok = false;
          }
        }
        h = row.result.log_parts.half_log_det;
        if (ok && unwrap_against(im, h)) tracked = true;
      }
      if (!tracked) row.flags.push_back("branch_ambiguous");
    }
    if (h != row.result.log_parts.half_log_det) {
      row.flags.push_back("branch_adjusted");
      row.semiclassical = with_half_log_det(row.result, h);
    }
    prev_tau = row.tau;
    prev_im = h.imag();
  }

  for (auto& row : rows) {
    if (row.has_exact && row.has_semiclassical) {
      row.abs_err = std::abs(row.semiclassical - row.exact);
      row.rel_err = std::abs(row.exact) > 0.0 ? row.abs_err / std::abs(row.exact)
                                              : std::numeric_limits<double>::infinity();
    }
  }
  return rows;
}

ActionHessianCheck action_hessian_check(const ShootingProblem& prob, const BvpSolution& sol,
                                        double step) {
  if (!(prob.tau > 0.0)) throw ValidationError("action-Hessian check needs tau > 0");
  if (!sol.converged()) throw ValidationError("action-Hessian check needs a converged solution");
  if (sol.trajectory.caustic_flag)
    throw CausticError("action-Hessian check is undefined at a caustic",
                       sol.trajectory.det_M22_ratio);
  if (!(step > 0.0)) throw ValidationError("finite-difference step must be positive");

  ShootingProblem fixed = prob;
  fixed.opts.ivp.fixed_grid = sol.trajectory.grid;
  fixed.opts.tolerance = 1e-14;
  const int n = prob.model.n;
  const double N = prob.N;
  const Eigen::Index d = n - 1;

  auto solve = [&](const Vector& w_i, const Vector& wbar_t) {
    ShootingProblem p = fixed;
    p.w_i = w_i;
    p.wbar_target = wbar_t;
    try {
      return solve_shooting(p, sol.wbar0);
    } catch (const ConvergenceError& e) {
      // Machine-precision targets can stall a hair above 1e-14.
      if (e.best_residual() > 1e-12) throw;
      p.opts.tolerance = 1e-12;
      return solve_shooting(p, sol.wbar0);
    }
  };
  auto action = [&](const Vector& w_i, const Vector& wbar_t) {
    try {
      const BvpSolution s = solve(w_i, wbar_t);
      return classical_action(s.trajectory, w_i, wbar_t, s.wbar0);
    } catch (const Error& e) {
      throw NumericalError(std::string("action-Hessian check inconclusive: ") + e.what());
    }
  };

  ActionHessianCheck out;
  out.hessian = Matrix::Zero(d, d);
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b) {
      Complex acc{};
      for (int sa : {1, -1})
        for (int sb : {1, -1}) {
          Vector wi = prob.w_i;
          Vector wt = prob.wbar_target;
          wi(a) += sa * step;
          wt(b) += sb * step;
          acc += static_cast<double>(sa * sb) * action(wi, wt);
        }
      out.hessian(a, b) = acc / (4.0 * step * step) / N;
    }

  const BvpSolution base = [&] {
    try {
      return solve(prob.w_i, prob.wbar_target);
    } catch (const Error& e) {
      throw NumericalError(std::string("action-Hessian check inconclusive: ") + e.what());
    }
  }();
  const auto& traj = base.trajectory;
  const Complex D_tau = traj.final().denominator();
  const Complex D_0 = 1.0 + bdot(base.wbar0, prob.w_i);
  const Complex D_tau_target = 1.0 + bdot(prob.wbar_target, traj.final().w);
  const double half_n = 0.5 * n;
  out.lhs = std::pow(D_tau / D_0, half_n) / traj.M22().determinant();
  out.rhs = std::pow(D_tau_target, half_n) * std::pow(D_0, half_n) * out.hessian.determinant();
  out.discrepancy = std::abs(out.lhs - out.rhs) / std::abs(out.lhs);
  return out;
}

}  // namespace sunsc
