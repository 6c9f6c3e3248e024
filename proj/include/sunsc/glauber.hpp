#pragma once

#include "sunsc/types.hpp"

namespace sunsc {

/// Point of the flat doubled phase space; z and zbar are independent.
struct GlauberPoint {
  Vector z;
  Vector zbar;
};

/// <z'|z> for normalized multimode harmonic-oscillator coherent states.
Complex glauber_overlap(const Vector& z_prime, const Vector& z);

/// Closed-form flow of the quadratic symbol zbar.h.z.
struct GlauberFlow {
  double tau = 0.0;
  Matrix h;
  GlauberPoint initial;
  GlauberPoint final;
  Complex action_integral{};      // int (1/2)(zbar' z - zbar z') - i H dt
  Complex trace_R22_integral{};   // i tau Tr h
  Matrix R11, R12, R21, R22;      // constant along the flow
  Matrix monodromy;               // block diagonal: exp(-i h tau), exp(i h^T tau)

  GlauberPoint at(double t) const;
};

GlauberFlow glauber_classical_flow(const Matrix& h, const Vector& z0, const Vector& zbar0,
                                   double tau);

/// i S_c for the boundary data z(0) = z_i, zbar(tau) = conj(z_f), boundary terms included.
Complex glauber_action(const Matrix& h, const Vector& z_i, const Vector& z_f, double tau);

/// K_sc = exp(i S_c - (|z_i|^2 + |z_f|^2)/2) exp((1/2) int Tr R22) sqrt(det dzbar(0)/dzbar(tau)).
Complex glauber_semiclassical_propagator(const Matrix& h, const Vector& z_i, const Vector& z_f,
                                         double tau);

/// exp(z_f^* . exp(-i h tau) . z_i - (|z_i|^2 + |z_f|^2)/2).
Complex glauber_exact(const Matrix& h, const Vector& z_i, const Vector& z_f, double tau);

}  // namespace sunsc
