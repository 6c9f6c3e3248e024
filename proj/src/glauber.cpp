#include "sunsc/glauber.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace sunsc {

namespace {

void check_shapes(const Matrix& h, const Vector& a, const Vector& b) {
  if (h.rows() != h.cols()) throw DimensionError("h must be square");
  if (a.size() != h.rows() || b.size() != h.rows())
    throw DimensionError("phase-space vectors must match the size of h");
}

Matrix propagator_matrix(const Matrix& h, double t) { return Matrix(-kI * t * h).exp(); }

// Gauss-Legendre nodes and weights on [-1, 1].
constexpr int kNodes = 8;
constexpr double kGlX[kNodes] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                 -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                 0.7966664774136267,  0.9602898564975363};
constexpr double kGlW[kNodes] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                 0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                 0.2223810344533745, 0.1012285362903763};

}  // namespace

Complex glauber_overlap(const Vector& z_prime, const Vector& z) {
  if (z_prime.size() != z.size()) throw DimensionError("overlap needs equal mode counts");
  return std::exp(z_prime.dot(z) - 0.5 * z_prime.squaredNorm() - 0.5 * z.squaredNorm());
}

GlauberPoint GlauberFlow::at(double t) const {
  return {propagator_matrix(h, t) * initial.z,
          propagator_matrix(Matrix(-h.transpose()), t) * initial.zbar};
}

GlauberFlow glauber_classical_flow(const Matrix& h, const Vector& z0, const Vector& zbar0,
                                   double tau) {
  check_shapes(h, z0, zbar0);
  GlauberFlow f;
  f.tau = tau;
  f.h = h;
  f.initial = {z0, zbar0};
  f.final = f.at(tau);
  const Eigen::Index d = h.rows();
  f.R11 = -kI * h;
  f.R12 = Matrix::Zero(d, d);
  f.R21 = Matrix::Zero(d, d);
  f.R22 = kI * h.transpose();
  f.monodromy = Matrix::Zero(2 * d, 2 * d);
  f.monodromy.topLeftCorner(d, d) = propagator_matrix(h, tau);
  f.monodromy.bottomRightCorner(d, d) = propagator_matrix(Matrix(-h.transpose()), tau);
  f.trace_R22_integral = kI * tau * h.trace();

  // Quadrature of the (identically vanishing) Lagrangian on the closed-form path.
  for (int k = 0; k < kNodes; ++k) {
    const double t = 0.5 * tau * (kGlX[k] + 1.0);
    const GlauberPoint p = f.at(t);
    const Vector zdot = -kI * (h * p.z);
    const Vector zbardot = kI * (h.transpose() * p.zbar);
    const Complex H = bdot(p.zbar, h * p.z);
    const Complex lagrangian = 0.5 * (bdot(zbardot, p.z) - bdot(p.zbar, zdot)) - kI * H;
    f.action_integral += 0.5 * tau * kGlW[k] * lagrangian;
  }
  return f;
}

Complex glauber_action(const Matrix& h, const Vector& z_i, const Vector& z_f, double tau) {
  check_shapes(h, z_i, z_f);
  const Vector zbar_target = z_f.conjugate();
  const Vector zbar0 = propagator_matrix(Matrix(h.transpose()), tau) * zbar_target;
  const GlauberFlow f = glauber_classical_flow(h, z_i, zbar0, tau);
  return f.action_integral + 0.5 * (bdot(zbar_target, f.final.z) + bdot(zbar0, z_i));
}

Complex glauber_semiclassical_propagator(const Matrix& h, const Vector& z_i, const Vector& z_f,
                                         double tau) {
  check_shapes(h, z_i, z_f);
  const Vector zbar0 = propagator_matrix(Matrix(h.transpose()), tau) * z_f.conjugate();
  const GlauberFlow f = glauber_classical_flow(h, z_i, zbar0, tau);
  const Complex iS = f.action_integral + 0.5 * (bdot(Vector(z_f.conjugate()), f.final.z) +
                                                bdot(zbar0, z_i));
  // dzbar(0)/dzbar(tau) = exp(-i h^T tau); its log is continued from 0 at tau = 0.
  const Complex log_det = -kI * tau * h.trace();
  return std::exp(iS - 0.5 * (z_i.squaredNorm() + z_f.squaredNorm()) +
                  0.5 * f.trace_R22_integral + 0.5 * log_det);
}

Complex glauber_exact(const Matrix& h, const Vector& z_i, const Vector& z_f, double tau) {
  check_shapes(h, z_i, z_f);
  return std::exp(z_f.dot(propagator_matrix(h, tau) * z_i) -
                  0.5 * (z_i.squaredNorm() + z_f.squaredNorm()));
}

}  // namespace sunsc
