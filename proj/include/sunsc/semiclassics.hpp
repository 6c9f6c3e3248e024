#pragma once

#include <string>
#include <vector>

#include "sunsc/bvp.hpp"

namespace sunsc {

/// Additive pieces of log K_sc.
struct LogParts {
  Complex iSc{};           // action integral plus boundary terms
  Complex iI{};            // correction term
  Complex norm_term{};     // -(N/2) log[(1+|w_f|^2)(1+|w_i|^2)]
  Complex half_log_det{};  // (1/2) Log of the determinant bracket, branch-tracked

  Complex total() const { return iSc + iI + norm_term + half_log_det; }
};

struct PropagatorDiagnostics {
  double det_M22_abs = 0.0;
  double det_M22_ratio = 0.0;
  double residual = 0.0;
  double energy_drift = 0.0;
  double liouville_defect = 0.0;
  int newton_iterations = 0;
  std::vector<std::string> warnings;
};

struct PropagatorResult {
  Complex amplitude{};
  LogParts log_parts;
  /// Net sign flips of the square root relative to its principal branch.
  int branch_index = 0;
  PropagatorDiagnostics diagnostics;
};

/// Semiclassical amplitude from a converged shooting solution:
///   K = exp(iSc + iI - N/2 log[(1+|w_f|^2)(1+|w_i|^2)])
///       * sqrt([D(tau)/D(0)]^(n/2) det M22^-1).
/// The square root follows the path continuation of Log D and log det M22.
PropagatorResult assemble_propagator(const BvpSolution& sol, const Vector& w_i, const Vector& w_f,
                                     int N, int n);

/// Solves with continuation and assembles.
PropagatorResult semiclassical_propagator(const HamiltonianModel& model, int N, const Vector& w_i,
                                          const Vector& w_f, double tau,
                                          const BvpOptions& opts = {});

struct ComparisonRow {
  double tau = 0.0;
  Complex exact{};
  Complex semiclassical{};
  double abs_err = 0.0;
  double rel_err = 0.0;
  bool has_exact = false;
  bool has_semiclassical = false;
  PropagatorResult result;
  std::vector<std::string> flags;  // empty when the row is clean
};

struct ComparisonOptions {
  BvpOptions bvp;
  bool exact = true;
  bool semiclassical = true;
  int jobs = 1;
  int branch_refinements = 6;  // ladder bisections allowed per branch jump
  long long dimension_cap = kDefaultDimensionCap;
};

/// One row per tau, in ascending tau. Failures become flagged rows. The
/// determinant branch is carried across the sorted grid so that adjacent rows
/// differ by less than pi/2 in Im(half_log_det), refining between rows when
/// needed.
std::vector<ComparisonRow> propagator_vs_exact(const HamiltonianModel& model, int N,
                                               const Vector& w_i, const Vector& w_f,
                                               std::vector<double> tau_grid,
                                               const ComparisonOptions& opts = {});

struct ActionHessianCheck {
  double discrepancy = 0.0;  // |lhs - rhs| / |lhs|
  Complex lhs{};             // [D(tau)/D(0)]^(n/2) det M22^-1
  Complex rhs{};             // [1+w_f* w(tau)]^(n/2) [1+wbar(0) w_i]^(n/2) det[(i/N) d2S]
  Matrix hessian;            // (1/N) d2(iS)/dw_i dw_f*, i.e. (i/N) d2S
};

/// Checks the determinant bracket against the mixed second derivative of the
/// classical action, differentiated by central differences with step `step`.
/// Every perturbed problem is re-solved on the base solution's time grid so
/// the discrete flow is a smooth function of the boundary data.
ActionHessianCheck action_hessian_check(const ShootingProblem& prob, const BvpSolution& sol,
                                        double step);

}  // namespace sunsc
