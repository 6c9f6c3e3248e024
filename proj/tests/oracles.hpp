#pragma once

// Independent reference computations used only by the tests.

#include <cmath>
#include <functional>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

#include "sunsc/types.hpp"

namespace oracle {

using sunsc::Complex;
using sunsc::Matrix;
using sunsc::Vector;

// Derivatives of a holomorphic f along direction v at x from the trapezoid
// rule on the circle x + r e^{i theta} v (Lyness-Moler). Exponentially
// accurate in the node count, with no subtractive cancellation.
template <typename F>
auto contour_derivative(const F& f, const Vector& x, const Vector& v, int order, double r = 0.1,
                        int nodes = 32) {
  using R = decltype(f(x));
  R acc = f(x) * Complex(0.0);
  for (int k = 0; k < nodes; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / nodes;
    const Complex e = std::polar(1.0, theta);
    acc = acc + f(Vector(x + r * e * v)) * std::pow(e, -order);
  }
  const double fact = order == 2 ? 2.0 : 1.0;
  return R(acc * Complex(fact / (nodes * std::pow(r, order))));
}

inline Vector unit(Eigen::Index size, Eigen::Index k) {
  Vector e = Vector::Zero(size);
  e(k) = 1.0;
  return e;
}

// d2 f / dx_a dx_b by polarization of directional second derivatives.
template <typename F>
Complex contour_mixed(const F& f, const Vector& x, Eigen::Index a, Eigen::Index b, double r = 0.1) {
  const Vector ea = unit(x.size(), a), eb = unit(x.size(), b);
  return (contour_derivative(f, x, Vector(ea + eb), 2, r) -
          contour_derivative(f, x, Vector(ea - eb), 2, r)) /
         4.0;
}

inline Complex central_difference(const std::function<Complex(const Vector&)>& f, const Vector& x,
                                  const Vector& v, double h) {
  return (f(Vector(x + h * v)) - f(Vector(x - h * v))) / (2.0 * h);
}

// The textbook closed forms, pole at wbar.w = 0 included.
inline Matrix literal_Q(const Vector& w, const Vector& wbar, int N) {
  const Complex s = sunsc::bdot(wbar, w);
  const Matrix outer = w * wbar.transpose();
  const Matrix I = Matrix::Identity(w.size(), w.size());
  return std::sqrt(double(N)) * (outer + std::sqrt(1.0 + s) * (s * I - outer)) / (s * (1.0 + s));
}

inline Matrix literal_Qinv(const Vector& w, const Vector& wbar, int N) {
  const Complex s = sunsc::bdot(wbar, w);
  const Matrix outer = w * wbar.transpose();
  const Matrix I = Matrix::Identity(w.size(), w.size());
  return (1.0 + s) / (std::sqrt(double(N)) * s) * (outer + (s * I - outer) / std::sqrt(1.0 + s));
}

inline Matrix principal_sqrt(const Matrix& m) { return m.sqrt(); }

// One-body evolution maps coherent states to coherent states:
// exp(-iH tau)|u> = |exp(-ih tau) u> with u = (w, 1), so
// K = (u_f^+ exp(-ih tau) u_i)^N / [(1+|w_f|^2)(1+|w_i|^2)]^(N/2).
inline Complex one_body_propagator(const Matrix& h, int N, const Vector& w_i, const Vector& w_f,
                                   double tau) {
  const Eigen::Index n = h.rows();
  Vector ui(n), uf(n);
  ui << w_i, 1.0;
  uf << w_f, 1.0;
  const Complex cross = uf.dot(Matrix(Complex(0, -tau) * h).exp() * ui);
  return std::pow(cross, N) / std::pow((1.0 + w_f.squaredNorm()) * (1.0 + w_i.squaredNorm()), N / 2.0);
}

}  // namespace oracle
