#pragma once

#include <vector>

#include "sunsc/types.hpp"

namespace sunsc {

/// Number-conserving bosonic Hamiltonian on n modes,
///   H = sum h[j][k] a+_j a_k + 1/2 sum V[j][k][l][m] a+_j a+_k a_l a_m,
/// in units where hbar = 1.
struct HamiltonianModel {
  int n = 0;
  Matrix h;
  std::vector<Complex> V;  // row-major n^4, empty means no two-body part

  HamiltonianModel() = default;
  explicit HamiltonianModel(int modes);

  Complex v(int j, int k, int l, int m) const {
    return V.empty() ? Complex{} : V[((static_cast<std::size_t>(j) * n + k) * n + l) * n + m];
  }
  Complex& v(int j, int k, int l, int m);

  bool is_one_body() const;

  /// Throws ValidationError if h is not Hermitian or V breaks the index
  /// symmetries V[jklm] = V[kjlm] = V[jkml] and conj(V[jklm]) = V[mlkj].
  void validate(double tol = 1e-12) const;
};

/// Two-mode Bose-Hubbard: hopping -J between the modes, on-site U.
HamiltonianModel bose_hubbard_dimer(double J, double U);

}  // namespace sunsc
