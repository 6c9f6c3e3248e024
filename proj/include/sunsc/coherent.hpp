#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "sunsc/fock.hpp"
#include "sunsc/model.hpp"

namespace sunsc {

inline constexpr double kSingularThreshold = 1e-12;

/// One point (w, wbar) of the complexified phase space. wbar is independent
/// of w; the physical slice wbar = conj(w) is only ever tested, never imposed.
template <typename Real = double>
struct DoubledPoint {
  VectorT<Real> w;
  VectorT<Real> wbar;

  Eigen::Index dim() const { return w.size(); }
  /// D = 1 + wbar.w
  ComplexT<Real> denominator() const { return Real(1) + bdot(wbar, w); }
  bool is_physical(Real tol = Real(1e-12)) const {
    return (wbar - w.conjugate()).cwiseAbs().maxCoeff() <= tol;
  }
  static DoubledPoint physical(const VectorT<Real>& w) { return {w, w.conjugate()}; }
};

/// Value and first/second derivatives of the effective Hamiltonian in the
/// doubled variables. hess_wwbar(a, b) = d^2 H / dw_a dwbar_b.
template <typename Real = double>
struct EffectiveHamiltonianJet {
  ComplexT<Real> value;
  VectorT<Real> grad_w;
  VectorT<Real> grad_wbar;
  MatrixT<Real> hess_ww;
  MatrixT<Real> hess_wwbar;
  MatrixT<Real> hess_wbarwbar;
};

/// <w'|w> for the N-particle representation.
template <typename Real>
ComplexT<Real> overlap(const VectorT<Real>& w_prime, const VectorT<Real>& w, int N) {
  const ComplexT<Real> cross = Real(1) + w_prime.dot(w);
  const Real a = Real(1) + w_prime.squaredNorm();
  const Real b = Real(1) + w.squaredNorm();
  if (std::abs(cross) == Real(0) && N > 0)
    return ComplexT<Real>(0);
  return std::pow(cross, N) / std::pow(a * b, Real(N) / 2);
}

/// log <w'|w> = N Log(1 + w'* w) - N/2 [log(1+|w'|^2) + log(1+|w|^2)], with
/// the principal Log. Use at large N where the amplitude itself underflows.
template <typename Real>
ComplexT<Real> log_overlap(const VectorT<Real>& w_prime, const VectorT<Real>& w, int N) {
  const ComplexT<Real> cross = Real(1) + w_prime.dot(w);
  if (std::abs(cross) == Real(0)) throw SingularityError("coherent states are orthogonal");
  return Real(N) * std::log(cross) -
         Real(N) / 2 * (std::log1p(w_prime.squaredNorm()) + std::log1p(w.squaredNorm()));
}

namespace detail {

// Jet of a polynomial P(wbar, w) in the first n-1 homogeneous coordinates.
template <typename Real>
struct PolyJet {
  ComplexT<Real> value;
  VectorT<Real> g_w, g_wbar;
  MatrixT<Real> h_ww, h_wwbar, h_wbarwbar;
};

// Adds c * P / D^p to the jet, using dD/dw = wbar, dD/dwbar = w,
// d2D/dw_a dwbar_b = delta_ab.
template <typename Real>
void add_quotient(EffectiveHamiltonianJet<Real>& jet, const PolyJet<Real>& P, int p, Real c,
                  const DoubledPoint<Real>& pt, ComplexT<Real> D) {
  const ComplexT<Real> Dp = std::pow(D, -p);
  const ComplexT<Real> Dp1 = Dp / D;
  const ComplexT<Real> Dp2 = Dp1 / D;
  const Real pr = Real(p);
  const auto& w = pt.w;
  const auto& wb = pt.wbar;
  const auto d = pt.dim();
  const auto I = MatrixT<Real>::Identity(d, d);
  jet.value += c * P.value * Dp;
  jet.grad_w += c * (P.g_w * Dp - pr * P.value * Dp1 * wb);
  jet.grad_wbar += c * (P.g_wbar * Dp - pr * P.value * Dp1 * w);
  jet.hess_ww += c * (P.h_ww * Dp -
                      pr * Dp1 * (P.g_w * wb.transpose() + wb * P.g_w.transpose()) +
                      pr * (pr + 1) * P.value * Dp2 * (wb * wb.transpose()));
  jet.hess_wbarwbar += c * (P.h_wbarwbar * Dp -
                            pr * Dp1 * (P.g_wbar * w.transpose() + w * P.g_wbar.transpose()) +
                            pr * (pr + 1) * P.value * Dp2 * (w * w.transpose()));
  jet.hess_wwbar += c * (P.h_wwbar * Dp -
                         pr * Dp1 * (P.g_w * w.transpose() + wb * P.g_wbar.transpose()) -
                         pr * P.value * Dp1 * I +
                         pr * (pr + 1) * P.value * Dp2 * (wb * w.transpose()));
}

}  // namespace detail

/// Closed-form normalized symbol
///   H(wbar, w) = N ubar.h.u / D + N(N-1)/2 sum V ubar ubar u u / D^2
/// with u = (w, 1), ubar = (wbar, 1), D = 1 + wbar.w, plus analytic
/// derivatives.
template <typename Real>
EffectiveHamiltonianJet<Real> effective_hamiltonian(const HamiltonianModel& model,
                                                    const DoubledPoint<Real>& pt, int N,
                                                    Real singular_threshold = Real(kSingularThreshold)) {
  using C = ComplexT<Real>;
  using Vec = VectorT<Real>;
  using Mat = MatrixT<Real>;
  const int n = model.n;
  const Eigen::Index d = n - 1;
  if (pt.w.size() != d || pt.wbar.size() != d)
    throw DimensionError("phase-space point must have n-1 components");
  const C D = pt.denominator();
  if (std::abs(D) <= singular_threshold)
    throw SingularityError("phase-space singularity: |1 + wbar.w| below threshold");

  Vec u(n), ub(n);
  u << pt.w, C(1);
  ub << pt.wbar, C(1);
  const Mat h = model.h.template cast<C>();

  EffectiveHamiltonianJet<Real> jet{C(0),          Vec::Zero(d),    Vec::Zero(d),
                                    Mat::Zero(d, d), Mat::Zero(d, d), Mat::Zero(d, d)};

  detail::PolyJet<Real> one;
  one.value = bdot(ub, h * u);
  one.g_w = (h.transpose() * ub).head(d);
  one.g_wbar = (h * u).head(d);
  one.h_ww = Mat::Zero(d, d);
  one.h_wbarwbar = Mat::Zero(d, d);
  one.h_wwbar = h.topLeftCorner(d, d).transpose();
  detail::add_quotient(jet, one, 1, Real(N), pt, D);

  if (!model.is_one_body() && N >= 2) {
    // W(l,m) = sum_jk V ubar_j ubar_k, Y(j,k) = sum_lm V u_l u_m
    Mat W = Mat::Zero(n, n), Y = Mat::Zero(n, n);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          for (int m = 0; m < n; ++m) {
            const C v = C(model.v(j, k, l, m));
            if (v == C(0)) continue;
            W(l, m) += v * ub(j) * ub(k);
            Y(j, k) += v * u(l) * u(m);
          }
    const Mat Ws = W + W.transpose();
    const Mat Ys = Y + Y.transpose();
    detail::PolyJet<Real> two;
    two.value = bdot(u, W * u);
    two.g_w = (Ws * u).head(d);
    two.g_wbar = (Ys * ub).head(d);
    two.h_ww = Ws.topLeftCorner(d, d);
    two.h_wbarwbar = Ys.topLeftCorner(d, d);
    two.h_wwbar = Mat::Zero(d, d);
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index b = 0; b < d; ++b) {
        C acc(0);
        for (int k = 0; k < n; ++k)
          for (int m = 0; m < n; ++m) {
            const C s = C(model.v(b, k, a, m) + model.v(b, k, m, a) + model.v(k, b, a, m) +
                          model.v(k, b, m, a));
            if (s != C(0)) acc += s * ub(k) * u(m);
          }
        two.h_wwbar(a, b) = acc;
      }
    detail::add_quotient(jet, two, 2, Real(N) * Real(N - 1) / 2, pt, D);
  }
  jet.hess_ww = ((jet.hess_ww + jet.hess_ww.transpose()) / Real(2)).eval();
  jet.hess_wbarwbar = ((jet.hess_wbarwbar + jet.hess_wbarwbar.transpose()) / Real(2)).eval();
  return jet;
}

/// Density of the invariant measure on the physical slice,
/// sigma(n) dim / (1 + |w|^2)^n with sigma(n) = (n-1)!/pi^(n-1).
inline double measure_weight(const Vector& w, int n, int N) {
  if (w.size() != n - 1) throw DimensionError("measure point must have n-1 components");
  const double sigma = std::tgamma(static_cast<double>(n)) / std::pow(std::numbers::pi, n - 1);
  return sigma * static_cast<double>(fock_dimension(n, N)) / std::pow(1.0 + w.squaredNorm(), n);
}

struct IdentityResolutionEstimate {
  Matrix estimate;
  Eigen::MatrixXd stderr_re;
  Eigen::MatrixXd stderr_im;
  std::size_t samples = 0;

  /// Largest |estimate - 1| in units of the standard error (real and
  /// imaginary parts separately); entries with zero spread must be exact.
  double max_sigma_deviation() const;
};

/// Monte Carlo estimate of \int dmu |w><w|. Samples u uniformly on the unit
/// sphere of C^n and sets w_j = u_j / u_n, which reproduces the measure
/// exactly (no importance weights).
IdentityResolutionEstimate identity_resolution_mc(int n, int N, std::size_t sample_count,
                                                  std::uint64_t seed,
                                                  long long dimension_cap = kDefaultDimensionCap);

}  // namespace sunsc
