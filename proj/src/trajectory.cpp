#include "sunsc/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace sunsc {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

// State layout: [w (d) | wbar (d) | M (4 d^2, column-major) | 5 quadratures].
enum Quadrature { kAction = 0, kCorrection, kTraceBt, kLiouville, kLogD, kQuadratures };

class FlowRhs {
 public:
  FlowRhs(const HamiltonianModel& model, int N, Eigen::Index d, double threshold)
      : model_(model), N_(N), d_(d), threshold_(threshold) {}

  Eigen::Index size() const { return 2 * d_ + 4 * d_ * d_ + kQuadratures; }
  Eigen::Index quad(Quadrature q) const { return 2 * d_ + 4 * d_ * d_ + q; }

  DoubledPoint<double> point(const Vector& y) const {
    return {y.head(d_), y.segment(d_, d_)};
  }
  Matrix monodromy(const Vector& y) const {
    return Eigen::Map<const Matrix>(y.data() + 2 * d_, 2 * d_, 2 * d_);
  }

  Vector operator()(const Vector& y) const {
    const auto p = point(y);
    const auto f = evaluate_flow(model_, p, N_, threshold_);
    Vector dy(size());
    dy.head(d_) = f.wdot;
    dy.segment(d_, d_) = f.wbardot;
    const Matrix R = f.R.jacobian();
    Eigen::Map<Matrix>(dy.data() + 2 * d_, 2 * d_, 2 * d_) = R * monodromy(y);
    const double rN = N_;
    dy(quad(kAction)) =
        rN / 2.0 * (bdot(f.wbardot, p.w) - bdot(p.wbar, f.wdot)) / f.D - kI * f.jet.value;
    dy(quad(kCorrection)) = -0.25 * (f.R.R11.trace() - f.R.R22.trace());
    dy(quad(kTraceBt)) = trace_btilde(model_, p, f.wdot, f.wbardot, N_, f.jet);
    dy(quad(kLiouville)) = f.R.R11.trace() + f.R.R22.trace();
    dy(quad(kLogD)) = (bdot(f.wbardot, p.w) + bdot(p.wbar, f.wdot)) / f.D;
    for (Eigen::Index i = 0; i < dy.size(); ++i)
      if (!std::isfinite(dy(i).real()) || !std::isfinite(dy(i).imag()))
        throw SingularityError("non-finite vector field");
    return dy;
  }

 private:
  const HamiltonianModel& model_;
  int N_;
  Eigen::Index d_;
  double threshold_;
};

struct StepResult {
  Vector y;
  Vector k7;
  double error;  // scaled RMS error estimate
};

StepResult dopri_step(const FlowRhs& f, const Vector& y, const Vector& k1, double h,
                      const IvpOptions& opts) {
  const Vector k2 = f(y + h * (a21 * k1));
  const Vector k3 = f(y + h * (a31 * k1 + a32 * k2));
  const Vector k4 = f(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
  const Vector k5 = f(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
  const Vector k6 = f(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
  StepResult r;
  r.y = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  r.k7 = f(r.y);
  const Vector err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * r.k7);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double scale = opts.atol + opts.rtol * std::max(std::abs(y(i)), std::abs(r.y(i)));
    acc += std::norm(err(i)) / (scale * scale);
  }
  r.error = std::sqrt(acc / static_cast<double>(y.size()));
  return r;
}

double wrap_to_nearest(double angle, double reference) {
  const double two_pi = 2.0 * std::numbers::pi;
  return angle + two_pi * std::round((reference - angle) / two_pi);
}

}  // namespace

double normalized_determinant(const Matrix& m) {
  double denom = 1.0;
  for (Eigen::Index c = 0; c < m.cols(); ++c) denom *= m.col(c).norm();
  if (denom == 0.0) return 0.0;
  return std::abs(m.determinant()) / denom;
}

double TrajectorySolution::liouville_defect() const {
  const Complex det = monodromy.determinant();
  const Complex expected = std::exp(liouville_trace_integral);
  return std::abs(det - expected) / std::abs(expected);
}

TrajectorySolution integrate_ivp(const HamiltonianModel& model, int N, const Vector& w0,
                                 const Vector& wbar0, double tau, const IvpOptions& opts) {
  const int n = model.n;
  const Eigen::Index d = n - 1;
  if (w0.size() != d || wbar0.size() != d)
    throw DimensionError("initial point must have n-1 components");
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw ValidationError("tau must be finite and >= 0");
  if (N < 1) throw ValidationError("classical trajectories need N >= 1");

  const FlowRhs f(model, N, d, opts.singular_threshold);
  Vector y = Vector::Zero(f.size());
  y.head(d) = w0;
  y.segment(d, d) = wbar0;
  Eigen::Map<Matrix>(y.data() + 2 * d, 2 * d, 2 * d) = Matrix::Identity(2 * d, 2 * d);

  TrajectorySolution sol;
  sol.N = N;
  sol.n = n;
  sol.tau = tau;
  const DoubledPoint<double> p0{w0, wbar0};
  if (std::abs(p0.denominator()) <= opts.singular_threshold)
    throw SingularityError("initial point sits on the phase-space singularity");
  sol.energy0 = effective_hamiltonian(model, p0, N).value;
  sol.min_abs_D = std::abs(p0.denominator());
  const Complex log_D0 = std::log(p0.denominator());

  double log_det_arg = 0.0;
  double log_det_abs = 0.0;
  auto record = [&](double t, const Vector& state) {
    const auto p = f.point(state);
    if (p.w.cwiseAbs().maxCoeff() > opts.blowup_norm ||
        p.wbar.cwiseAbs().maxCoeff() > opts.blowup_norm) {
      std::ostringstream os;
      os << "trajectory escaped to infinity (|w| or |wbar| > " << opts.blowup_norm
         << ") at t=" << t;
      throw IntegrationError(os.str(), t);
    }
    const Complex D = p.denominator();
    sol.min_abs_D = std::min(sol.min_abs_D, std::abs(D));
    const Complex H = effective_hamiltonian(model, p, N, opts.singular_threshold).value;
    sol.energy_drift = std::max(sol.energy_drift, std::abs(H - sol.energy0));
    const Complex det22 = f.monodromy(state).bottomRightCorner(d, d).determinant();
    log_det_abs = std::log(std::abs(det22));
    log_det_arg = wrap_to_nearest(std::arg(det22), log_det_arg);
    sol.grid.push_back(t);
    sol.points.push_back(p);
  };
  record(0.0, y);

  Vector k1 = f(y);
  double t = 0.0;
  if (!opts.fixed_grid.empty()) {
    const auto& g = opts.fixed_grid;
    if (g.front() != 0.0 || std::abs(g.back() - tau) > 1e-14 * std::max(1.0, tau))
      throw ValidationError("fixed grid must run from 0 to tau");
    for (std::size_t i = 1; i < g.size(); ++i) {
      const double h = g[i] - g[i - 1];
      if (!(h > 0.0)) throw ValidationError("fixed grid must be strictly increasing");
      StepResult r;
      try {
        r = dopri_step(f, y, k1, h, opts);
      } catch (const SingularityError& e) {
        throw IntegrationError(std::string("flow blew up on fixed grid: ") + e.what(), g[i - 1]);
      }
      y = std::move(r.y);
      k1 = std::move(r.k7);
      t = g[i];
      ++sol.accepted_steps;
      record(t, y);
    }
  } else if (tau > 0.0) {
    std::vector<double> stops = opts.output_times;
    stops.push_back(tau);
    std::sort(stops.begin(), stops.end());
    stops.erase(std::remove_if(stops.begin(), stops.end(),
                               [tau](double s) { return !(s > 0.0) || s > tau; }),
                stops.end());
    stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
    std::size_t next_stop = 0;

    const double h_min = opts.min_step_fraction * tau;
    double h = opts.initial_step > 0.0 ? opts.initial_step : tau / 64.0;
    while (next_stop < stops.size()) {
      if (sol.accepted_steps + sol.rejected_steps >= opts.max_steps)
        throw IntegrationError("step budget exhausted", t);
      const double target = stops[next_stop];
      bool lands = false;
      double step = h;
      if (t + step >= target - 1e-15 * std::max(1.0, target)) {
        step = target - t;
        lands = true;
      }
      StepResult r;
      bool ok = true;
      try {
        r = dopri_step(f, y, k1, step, opts);
        ok = std::isfinite(r.error);
      } catch (const SingularityError&) {
        ok = false;
      }
      if (!ok) {
        ++sol.rejected_steps;
        h = step / 4.0;
        if (h < h_min) {
          std::ostringstream os;
          os << "step size underflow near a phase-space singularity at t=" << t;
          throw IntegrationError(os.str(), t);
        }
        continue;
      }
      const double factor =
          r.error == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(r.error, -0.2), 0.2, 5.0);
      if (r.error <= 1.0) {
        t = lands ? target : t + step;
        y = std::move(r.y);
        k1 = std::move(r.k7);
        ++sol.accepted_steps;
        record(t, y);
        if (lands) ++next_stop;
        // Keep the uncapped proposal so a short landing step does not throttle
        // the next one.
        h = lands ? std::max(h, step * factor) : step * factor;
      } else {
        ++sol.rejected_steps;
        h = step * std::max(factor, 0.1);
        if (h < h_min) {
          std::ostringstream os;
          os << "step size underflow at t=" << t << " (error estimate " << r.error << ")";
          throw IntegrationError(os.str(), t);
        }
      }
    }
  }

  sol.monodromy = f.monodromy(y);
  sol.action_integral = y(f.quad(kAction));
  sol.correction_integral = y(f.quad(kCorrection));
  sol.trace_btilde_integral = y(f.quad(kTraceBt));
  sol.liouville_trace_integral = y(f.quad(kLiouville));
  sol.log_D_increment = y(f.quad(kLogD));
  sol.log_det_M22 = Complex(log_det_abs, log_det_arg);
  sol.det_M22_ratio = normalized_determinant(sol.M22());
  sol.caustic_flag = sol.det_M22_ratio < opts.caustic_threshold;
  sol.singularity_flag = sol.min_abs_D < opts.singular_warn;
  // Each winding of Log D about the origin flips the continued sqrt(D).
  const double winding =
      (log_D0 + sol.log_D_increment - std::log(sol.final().denominator())).imag();
  sol.sqrt_branch_flips =
      static_cast<int>(std::lround(std::abs(winding) / (2.0 * std::numbers::pi)));
  return sol;
}

}  // namespace sunsc
