#pragma once

#include <optional>

#include "sunsc/coherent.hpp"

namespace sunsc {

/// Xi and its relatives at one doubled point. Theta = Xi^-1, Q^2 = Theta,
/// and every barred matrix is the transpose of its unbarred partner.
template <typename Real = double>
struct PhaseSpaceMatrices {
  MatrixT<Real> Xi, Xibar;
  MatrixT<Real> Theta, Thetabar;
  MatrixT<Real> Q, Qbar;
  MatrixT<Real> Qinv, Qbarinv;
  ComplexT<Real> sqrt_D;      // branch of sqrt(1 + wbar.w) used in Q
  bool branch_flipped = false;  // sqrt_D is minus the principal root
};

/// Xi = D (1 + w x wbar) / N, Theta = N (D 1 - w x wbar) / D^2 and
///   Q    = sqrt(N)/D [sqrt(D) 1 - w x wbar / (1 + sqrt(D))]
///   Qinv = sqrt(D)/sqrt(N) [1 + w x wbar / (1 + sqrt(D))],
/// which is the textbook closed form with the removable 1/(wbar.w) pole
/// cancelled. Passing previous_sqrt_D picks the root continuous with it.
template <typename Real>
PhaseSpaceMatrices<Real> phase_space_matrices(const DoubledPoint<Real>& p, int N,
                                              std::optional<ComplexT<Real>> previous_sqrt_D = {},
                                              Real singular_threshold = Real(kSingularThreshold)) {
  using C = ComplexT<Real>;
  using Mat = MatrixT<Real>;
  if (N < 1) throw ValidationError("phase-space matrices need N >= 1");
  const C D = p.denominator();
  if (std::abs(D) <= singular_threshold)
    throw SingularityError("phase-space singularity: |1 + wbar.w| below threshold");
  const auto d = p.dim();
  const Mat I = Mat::Identity(d, d);
  const Mat outer = p.w * p.wbar.transpose();  // (w x wbar)_jk = w_j wbar_k
  const Real rN = Real(N);
  const Real sN = std::sqrt(rN);

  PhaseSpaceMatrices<Real> m;
  m.Xi = D / rN * (I + outer);
  m.Xibar = m.Xi.transpose();
  m.Theta = rN * (D * I - outer) / (D * D);
  m.Thetabar = m.Theta.transpose();

  C root = std::sqrt(D);
  if (previous_sqrt_D && std::abs(root + *previous_sqrt_D) < std::abs(root - *previous_sqrt_D)) {
    root = -root;
    m.branch_flipped = true;
  }
  m.sqrt_D = root;
  const C shift = C(1) + root;
  if (std::abs(shift) <= Real(1e-8))
    throw SingularityError("Q is undefined on the non-principal branch at w.wbar = 0");
  m.Q = sN / D * (root * I - outer / shift);
  m.Qinv = root / sN * (I + outer / shift);
  m.Qbar = m.Q.transpose();
  m.Qbarinv = m.Qinv.transpose();
  return m;
}

/// Jacobian blocks of the classical flow,
/// d/dt (dw, dwbar) = [[R11, R12], [R21, R22]] (dw, dwbar).
template <typename Real = double>
struct TangentBlocks {
  MatrixT<Real> R11, R12, R21, R22;

  MatrixT<Real> jacobian() const {
    const auto d = R11.rows();
    MatrixT<Real> J(2 * d, 2 * d);
    J << R11, R12, R21, R22;
    return J;
  }
};

/// Everything the integrator needs at one point, from a single symbol
/// evaluation.
template <typename Real = double>
struct FlowEvaluation {
  EffectiveHamiltonianJet<Real> jet;
  ComplexT<Real> D;
  VectorT<Real> wdot, wbardot;
  TangentBlocks<Real> R;
};

template <typename Real>
FlowEvaluation<Real> evaluate_flow(const HamiltonianModel& model, const DoubledPoint<Real>& p, int N,
                                   Real singular_threshold = Real(kSingularThreshold)) {
  using C = ComplexT<Real>;
  using Vec = VectorT<Real>;
  using Mat = MatrixT<Real>;
  if (N < 1) throw ValidationError("classical flow needs N >= 1");
  FlowEvaluation<Real> f;
  f.jet = effective_hamiltonian(model, p, N, singular_threshold);
  f.D = p.denominator();
  const C iu(0, 1);
  const Real rN = Real(N);
  const auto d = p.dim();
  const Mat I = Mat::Identity(d, d);
  const Vec& w = p.w;
  const Vec& wb = p.wbar;
  const Vec& gb = f.jet.grad_wbar;
  const Vec& g = f.jet.grad_w;
  const C D = f.D;

  // F = Xi dH/dwbar, G = Xibar dH/dw
  const C sb = bdot(wb, gb);
  const C s = bdot(w, g);
  const Vec F0 = gb + w * sb;
  const Vec G0 = g + wb * s;
  f.wdot = -iu * (D / rN) * F0;
  f.wbardot = iu * (D / rN) * G0;

  const Mat& Hxb = f.jet.hess_wwbar;
  const Mat& Hxx = f.jet.hess_ww;
  const Mat& Hbb = f.jet.hess_wbarwbar;
  const Mat dF_dw = (F0 * wb.transpose() +
                     D * (Hxb.transpose() + sb * I + w * (Hxb * wb).transpose())) / rN;
  const Mat dF_dwb = (F0 * w.transpose() + D * (Hbb + w * (gb + Hbb * wb).transpose())) / rN;
  const Mat dG_dw = (G0 * wb.transpose() + D * (Hxx + wb * (g + Hxx * w).transpose())) / rN;
  const Mat dG_dwb = (G0 * w.transpose() +
                      D * (Hxb + s * I + wb * (w.transpose() * Hxb))) / rN;
  f.R.R11 = -iu * dF_dw;
  f.R.R12 = -iu * dF_dwb;
  f.R.R21 = iu * dG_dw;
  f.R.R22 = iu * dG_dwb;
  return f;
}

/// (wdot, wbardot) = (-i Xi dH/dwbar, +i Xibar dH/dw).
template <typename Real>
std::pair<VectorT<Real>, VectorT<Real>> equations_of_motion(
    const HamiltonianModel& model, const DoubledPoint<Real>& p, int N,
    Real singular_threshold = Real(kSingularThreshold)) {
  auto f = evaluate_flow(model, p, N, singular_threshold);
  return {std::move(f.wdot), std::move(f.wbardot)};
}

template <typename Real>
TangentBlocks<Real> tangent_blocks(const HamiltonianModel& model, const DoubledPoint<Real>& p, int N,
                                   Real singular_threshold = Real(kSingularThreshold)) {
  return evaluate_flow(model, p, N, singular_threshold).R;
}

/// Second-variation matrices of the action around a trajectory, and their
/// images under nu = Q eta, nubar = Qbar etabar.
template <typename Real = double>
struct QuadraticFormMatrices {
  MatrixT<Real> A, B, C;
  MatrixT<Real> At, Bt, Ct;
  MatrixT<Real> Qbar_dot;
};

namespace detail {

// Geometric (symplectic-form) part of A, B, C; normalized so that
// i d2S = int eta Thetabar etabar' - etabar Theta eta' + eta A eta + ...
// with Theta carrying its factor N.
template <typename Real>
void geometric_forms(const DoubledPoint<Real>& p, const VectorT<Real>& wdot,
                     const VectorT<Real>& wbardot, int N, MatrixT<Real>& A, MatrixT<Real>& B,
                     MatrixT<Real>& C) {
  using Cx = ComplexT<Real>;
  using Mat = MatrixT<Real>;
  const auto& w = p.w;
  const auto& wb = p.wbar;
  const auto d = p.dim();
  const Mat I = Mat::Identity(d, d);
  const Cx D = p.denominator();
  const Cx D3 = D * D * D;
  const Real rN = Real(N);
  const Cx wbd_w = bdot(wbardot, w);
  const Cx wb_wd = bdot(wb, wdot);
  A = rN * (Real(2) * wbd_w * (wb * wb.transpose()) -
            D * (wb * wbardot.transpose() + wbardot * wb.transpose())) / D3;
  B = rN / Real(2) *
      ((wbd_w - wb_wd) * (Real(2) * (wb * w.transpose()) - D * I) +
       D * (wb * wdot.transpose() - wbardot * w.transpose())) / D3;
  C = rN * (D * (w * wdot.transpose() + wdot * w.transpose()) -
            Real(2) * wb_wd * (w * w.transpose())) / D3;
}

}  // namespace detail

/// Tr(Thetabar^-1 B) = Tr(Xibar B) without forming Q: the integrand of the
/// correction term along the second route.
template <typename Real>
ComplexT<Real> trace_btilde(const HamiltonianModel& model, const DoubledPoint<Real>& p,
                            const VectorT<Real>& wdot, const VectorT<Real>& wbardot, int N,
                            const EffectiveHamiltonianJet<Real>& jet) {
  (void)model;
  MatrixT<Real> A, B, C;
  detail::geometric_forms(p, wdot, wbardot, N, A, B, C);
  B -= ComplexT<Real>(0, 1) * jet.hess_wwbar;
  const auto d = p.dim();
  const MatrixT<Real> Xibar =
      p.denominator() / Real(N) * (MatrixT<Real>::Identity(d, d) + p.wbar * p.w.transpose());
  return (Xibar * B).trace();
}

/// pdot must be the flow velocity at p. dQbar/dt is obtained by the chain rule
/// through (wdot, wbardot) using the same sqrt branch as phase_space_matrices.
template <typename Real>
QuadraticFormMatrices<Real> quadratic_forms(const HamiltonianModel& model,
                                            const DoubledPoint<Real>& p,
                                            const DoubledPoint<Real>& pdot, int N,
                                            std::optional<ComplexT<Real>> previous_sqrt_D = {}) {
  using Cx = ComplexT<Real>;
  using Mat = MatrixT<Real>;
  const Cx iu(0, 1);
  const auto jet = effective_hamiltonian(model, p, N);
  const auto psm = phase_space_matrices(p, N, previous_sqrt_D);
  QuadraticFormMatrices<Real> q;
  detail::geometric_forms(p, pdot.w, pdot.wbar, N, q.A, q.B, q.C);
  q.A -= iu * jet.hess_ww;
  q.B -= iu * jet.hess_wwbar;
  q.C -= iu * jet.hess_wbarwbar;

  // Q = sqrt(N) [D^-1/2 1 - (w x wbar) / (D (1 + sqrt D))]
  const auto d = p.dim();
  const Mat I = Mat::Identity(d, d);
  const Cx D = p.denominator();
  const Cx r = psm.sqrt_D;
  const Cx Ddot = bdot(pdot.wbar, p.w) + bdot(p.wbar, pdot.w);
  const Cx g = D * (Cx(1) + r);
  const Cx gdot = Ddot * (Cx(1) + r) + D * Ddot / (Real(2) * r);
  const Mat outer = p.w * p.wbar.transpose();
  const Mat outer_dot = pdot.w * p.wbar.transpose() + p.w * pdot.wbar.transpose();
  const Mat Q_dot = std::sqrt(Real(N)) *
                    (-Ddot / (Real(2) * D * r) * I + gdot / (g * g) * outer - outer_dot / g);
  q.Qbar_dot = Q_dot.transpose();

  q.At = psm.Qbarinv * q.A * psm.Qinv;
  q.Bt = psm.Qbarinv * q.B * psm.Qbarinv -
         (q.Qbar_dot * psm.Qbarinv - psm.Qbarinv * q.Qbar_dot) / Real(2);
  q.Ct = psm.Qinv * q.C * psm.Qbarinv;
  return q;
}

}  // namespace sunsc
