#pragma once

#include <map>
#include <vector>

#include "sunsc/model.hpp"

namespace sunsc {

inline constexpr long long kDefaultDimensionCap = 20000;

/// dim of the N-boson, n-mode symmetric space, (N+n-1 choose N). Saturates at
/// LLONG_MAX instead of overflowing.
long long fock_dimension(int n, int N);

/// Occupation-number basis with sum(m) = N, ordered lexicographically
/// descending: (N,0,...,0) first, (0,...,0,N) last.
class FockBasis {
 public:
  using Occupation = std::vector<int>;

  FockBasis(int n, int N, long long dimension_cap = kDefaultDimensionCap);

  int modes() const { return n_; }
  int particles() const { return N_; }
  std::size_t size() const { return states_.size(); }
  const Occupation& state(std::size_t i) const { return states_[i]; }
  const std::vector<Occupation>& states() const { return states_; }

  /// Position of an occupation vector; size() when absent.
  std::size_t index(const Occupation& m) const;

 private:
  int n_;
  int N_;
  std::vector<Occupation> states_;
  std::map<Occupation, std::size_t> index_;
};

inline FockBasis build_basis(int n, int N, long long dimension_cap = kDefaultDimensionCap) {
  return FockBasis(n, N, dimension_cap);
}

/// Dense matrix of H restricted to the basis.
Matrix hamiltonian_matrix(const HamiltonianModel& model, const FockBasis& basis);

/// Normalized SU(n) coherent state |w>, evaluated in log space so that large N
/// does not overflow the multinomial coefficients. 0^0 = 1.
Vector coherent_vector(const Vector& w, const FockBasis& basis);

/// <w'|w> by explicit inner product of coherent vectors.
Complex overlap_exact(const Vector& w_prime, const Vector& w, const FockBasis& basis);

/// <wbar*|H|w> / <wbar*|w> by brute-force matrix-vector products.
Complex effective_hamiltonian_oracle(const HamiltonianModel& model, const FockBasis& basis,
                                     const Vector& wbar, const Vector& w,
                                     double singular_threshold = 1e-12);
Complex effective_hamiltonian_oracle(const Matrix& H, const FockBasis& basis, const Vector& wbar,
                                     const Vector& w, double singular_threshold = 1e-12);

/// Exact time evolution through a dense Hermitian eigendecomposition that is
/// computed once and reused for every (w_i, w_f, tau).
class ExactPropagator {
 public:
  ExactPropagator(const HamiltonianModel& model, const FockBasis& basis);

  const FockBasis& basis() const { return basis_; }
  const Eigen::VectorXd& energies() const { return energies_; }

  /// exp(-i H tau) psi.
  Vector evolve(const Vector& psi, double tau) const;
  /// <w_f| exp(-i H tau) |w_i>.
  Complex operator()(const Vector& w_i, const Vector& w_f, double tau) const;

 private:
  FockBasis basis_;
  Eigen::VectorXd energies_;
  Matrix eigenvectors_;
};

Complex exact_propagator(const HamiltonianModel& model, const FockBasis& basis, const Vector& w_i,
                         const Vector& w_f, double tau);

}  // namespace sunsc
