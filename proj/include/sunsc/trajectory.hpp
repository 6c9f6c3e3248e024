#pragma once

#include <vector>

#include "sunsc/classical.hpp"

namespace sunsc {

struct IvpOptions {
  double atol = 1e-10;
  double rtol = 1e-10;
  double initial_step = 0.0;       // 0 picks tau/64
  std::size_t max_steps = 2000000;
  double min_step_fraction = 1e-13;  // step underflow relative to tau
  double singular_threshold = kSingularThreshold;
  double singular_warn = 1e-6;      // |D| below this raises singularity_flag
  double caustic_threshold = 1e-12;  // |det M22| / prod |col M22| below this
  double blowup_norm = 1e8;          // max |w|, |wbar| before the flow counts as escaped
  /// Times the integrator must land on exactly (dense sampling). They are
  /// recorded in the grid in addition to the accepted steps.
  std::vector<double> output_times;
  /// When non-empty, replay exactly this monotone grid (first 0, last tau)
  /// with no error control. The numerical flow is then a smooth function of
  /// the initial data, which finite-difference checks rely on.
  std::vector<double> fixed_grid;
};

/// A classical trajectory of the doubled phase space with every quantity the
/// propagator needs, accumulated in the same error-controlled ODE state.
struct TrajectorySolution {
  int N = 0;
  int n = 0;
  double tau = 0.0;
  std::vector<double> grid;
  std::vector<DoubledPoint<double>> points;

  /// int (N/2)(wbar' w - wbar w')/D - i H dt, no boundary terms.
  Complex action_integral{};
  /// i I = -(1/4) int Tr(R11 - R22) dt.
  Complex correction_integral{};
  /// int Tr(Xibar B) dt, the second route to the correction term.
  Complex trace_btilde_integral{};
  /// int Tr(R11 + R22) dt, for the Liouville check on det M.
  Complex liouville_trace_integral{};
  /// Log D(tau) - Log D(0) continued along the path.
  Complex log_D_increment{};
  /// log det M22(t) continued along the path from 0 at t = 0.
  Complex log_det_M22{};

  Matrix monodromy;  // 2d x 2d, maps (dw(0), dwbar(0)) to (dw(tau), dwbar(tau))

  Complex energy0{};
  double energy_drift = 0.0;
  double min_abs_D = 0.0;
  double det_M22_ratio = 1.0;  // |det M22| / prod of column norms
  bool caustic_flag = false;
  bool singularity_flag = false;
  int sqrt_branch_flips = 0;  // times the continuous sqrt(D) left the principal branch
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;

  Eigen::Index dim() const { return monodromy.rows() / 2; }
  const DoubledPoint<double>& initial() const { return points.front(); }
  const DoubledPoint<double>& final() const { return points.back(); }
  Matrix M11() const { return monodromy.topLeftCorner(dim(), dim()); }
  Matrix M12() const { return monodromy.topRightCorner(dim(), dim()); }
  Matrix M21() const { return monodromy.bottomLeftCorner(dim(), dim()); }
  Matrix M22() const { return monodromy.bottomRightCorner(dim(), dim()); }
  /// Relative deviation of det M from exp(int Tr(R11 + R22)).
  double liouville_defect() const;
};

/// Integrates the classical flow from (w0, wbar0) over [0, tau] with an
/// embedded Dormand-Prince 5(4) pair, co-integrating the monodromy and the
/// action, correction and diagnostic quadratures.
TrajectorySolution integrate_ivp(const HamiltonianModel& model, int N, const Vector& w0,
                                 const Vector& wbar0, double tau, const IvpOptions& opts = {});

/// |det M| / prod of column norms, in [0, 1]; small means nearly singular.
double normalized_determinant(const Matrix& m);

}  // namespace sunsc
