#include "sunsc/fock.hpp"

#include <climits>
#include <cmath>
#include <numeric>
#include <sstream>

namespace sunsc {

long long fock_dimension(int n, int N) {
  if (n < 1 || N < 0) return 0;
  // C(N+n-1, n-1) built incrementally; each partial product is itself a
  // binomial coefficient, so the division is exact.
  long long result = 1;
  const int r = n - 1;
  for (int i = 1; i <= r; ++i) {
    const long long num = static_cast<long long>(N) + i;
    if (result > LLONG_MAX / num) return LLONG_MAX;
    result = result * num / i;
  }
  return result;
}

FockBasis::FockBasis(int n, int N, long long dimension_cap) : n_(n), N_(N) {
  if (n < 2) throw ValidationError("Fock basis needs n >= 2 modes");
  if (N < 0) throw ValidationError("particle number must be non-negative");
  const long long dim = fock_dimension(n, N);
  if (dim > dimension_cap) {
    std::ostringstream os;
    os << "Fock dimension " << dim << " for n=" << n << ", N=" << N << " exceeds cap "
       << dimension_cap;
    throw CapacityError(os.str(), dim);
  }
  states_.reserve(static_cast<std::size_t>(dim));
  Occupation m(n, 0);
  m[0] = N;
  while (true) {
    index_.emplace(m, states_.size());
    states_.push_back(m);
    // Next state in descending lexicographic order: take one particle from the
    // rightmost occupied mode k < n-1 and move everything after it to k+1.
    int k = n - 2;
    while (k >= 0 && m[k] == 0) --k;
    if (k < 0) break;
    --m[k];
    int tail = 0;
    for (int j = k + 1; j < n; ++j) {
      tail += m[j];
      m[j] = 0;
    }
    m[k + 1] = tail + 1;
  }
}

std::size_t FockBasis::index(const Occupation& m) const {
  const auto it = index_.find(m);
  return it == index_.end() ? states_.size() : it->second;
}

namespace {

// Applies a_{mode} (lower) or a+_{mode} in place; returns the amplitude, 0 if
// the state is annihilated.
template <typename Real>
Real lower(std::vector<int>& m, int mode) {
  if (m[mode] == 0) return Real(0);
  const Real amp = std::sqrt(static_cast<Real>(m[mode]));
  --m[mode];
  return amp;
}

template <typename Real>
Real raise(std::vector<int>& m, int mode) {
  ++m[mode];
  return std::sqrt(static_cast<Real>(m[mode]));
}

template <typename Real>
MatrixT<Real> build_hamiltonian(const HamiltonianModel& model, const FockBasis& basis) {
  using C = ComplexT<Real>;
  const int n = basis.modes();
  if (model.n != n) throw DimensionError("model and basis have different mode counts");
  const auto dim = static_cast<Eigen::Index>(basis.size());
  MatrixT<Real> H = MatrixT<Real>::Zero(dim, dim);
  const bool two_body = !model.is_one_body();
  for (Eigen::Index s = 0; s < dim; ++s) {
    const auto& m0 = basis.state(static_cast<std::size_t>(s));
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const C hjk(model.h(j, k));
        if (hjk == C{}) continue;
        auto m = m0;
        Real amp = lower<Real>(m, k);
        if (amp == Real(0)) continue;
        amp *= raise<Real>(m, j);
        H(static_cast<Eigen::Index>(basis.index(m)), s) += hjk * amp;
      }
    if (!two_body) continue;
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          for (int mm = 0; mm < n; ++mm) {
            const C v(model.v(j, k, l, mm));
            if (v == C{}) continue;
            auto m = m0;
            Real amp = lower<Real>(m, mm);
            if (amp == Real(0)) continue;
            amp *= lower<Real>(m, l);
            if (amp == Real(0)) continue;
            amp *= raise<Real>(m, k);
            amp *= raise<Real>(m, j);
            H(static_cast<Eigen::Index>(basis.index(m)), s) += Real(0.5) * v * amp;
          }
  }
  return H;
}

// Unnormalized coherent amplitudes sqrt(N!/prod m_j!) prod w_j^m_j, without
// conjugation, so that bra(wbar) . H . ket(w) is holomorphic in (wbar, w).
template <typename Real>
VectorT<Real> coherent_polynomial(const VectorT<Real>& w, const FockBasis& basis) {
  const int n = basis.modes();
  const Real lg_N = std::lgamma(static_cast<Real>(basis.particles()) + 1);
  VectorT<Real> out(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t s = 0; s < basis.size(); ++s) {
    const auto& m = basis.state(s);
    Real log_c = lg_N;
    ComplexT<Real> mono(1);
    for (int j = 0; j < n; ++j) {
      log_c -= std::lgamma(static_cast<Real>(m[j]) + 1);
      if (j < n - 1)
        for (int p = 0; p < m[j]; ++p) mono *= w(j);
    }
    out(static_cast<Eigen::Index>(s)) = std::exp(log_c / 2) * mono;
  }
  return out;
}

}  // namespace

Matrix hamiltonian_matrix(const HamiltonianModel& model, const FockBasis& basis) {
  return build_hamiltonian<double>(model, basis);
}

Vector coherent_vector(const Vector& w, const FockBasis& basis) {
  const int n = basis.modes();
  const int N = basis.particles();
  if (w.size() != n - 1) throw DimensionError("coherent-state label must have n-1 components");
  const double log_norm = 0.5 * N * std::log1p(w.squaredNorm());
  std::vector<double> log_abs(n - 1);
  std::vector<double> phase(n - 1);
  for (int j = 0; j < n - 1; ++j) {
    log_abs[j] = std::log(std::abs(w(j)));
    phase[j] = std::arg(w(j));
  }
  const double lg_N = std::lgamma(N + 1.0);
  Vector out(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t s = 0; s < basis.size(); ++s) {
    const auto& m = basis.state(s);
    double log_mag = 0.5 * lg_N - log_norm;
    double ph = 0.0;
    bool vanishes = false;
    for (int j = 0; j < n; ++j) {
      log_mag -= 0.5 * std::lgamma(m[j] + 1.0);
      if (j == n - 1 || m[j] == 0) continue;
      if (w(j) == Complex{}) {
        vanishes = true;
        break;
      }
      log_mag += m[j] * log_abs[j];
      ph += m[j] * phase[j];
    }
    out(static_cast<Eigen::Index>(s)) = vanishes ? Complex{} : std::polar(std::exp(log_mag), ph);
  }
  return out;
}

Complex overlap_exact(const Vector& w_prime, const Vector& w, const FockBasis& basis) {
  return coherent_vector(w_prime, basis).dot(coherent_vector(w, basis));
}

namespace {

template <typename Real>
Complex symbol_ratio(const MatrixT<Real>& H, const FockBasis& basis, const Vector& wbar,
                     const Vector& w, double singular_threshold) {
  if (static_cast<int>(wbar.size()) != basis.modes() - 1 ||
      static_cast<int>(w.size()) != basis.modes() - 1)
    throw DimensionError("phase-space point must have n-1 components");
  if (std::abs(1.0 + bdot(wbar, w)) <= singular_threshold)
    throw SingularityError("1 + wbar.w is too close to zero for the effective Hamiltonian");
  using C = ComplexT<Real>;
  const VectorT<Real> bra = coherent_polynomial<Real>(wbar.cast<C>(), basis);
  const VectorT<Real> ket = coherent_polynomial<Real>(w.cast<C>(), basis);
  return Complex(bdot(bra, H * ket) / bdot(bra, ket));
}

}  // namespace

// The Fock sums cancel heavily when |1 + wbar.w| is small, so the model
// overload works in extended precision.
Complex effective_hamiltonian_oracle(const Matrix& H, const FockBasis& basis, const Vector& wbar,
                                     const Vector& w, double singular_threshold) {
  return symbol_ratio<double>(H, basis, wbar, w, singular_threshold);
}

Complex effective_hamiltonian_oracle(const HamiltonianModel& model, const FockBasis& basis,
                                     const Vector& wbar, const Vector& w,
                                     double singular_threshold) {
  return symbol_ratio<long double>(build_hamiltonian<long double>(model, basis), basis, wbar, w,
                                   singular_threshold);
}

ExactPropagator::ExactPropagator(const HamiltonianModel& model, const FockBasis& basis)
    : basis_(basis) {
  const Matrix H = hamiltonian_matrix(model, basis);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(H);
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "Hermitian eigendecomposition failed (dim=" << H.rows()
       << ", |H|_max=" << H.cwiseAbs().maxCoeff()
       << ", hermiticity defect=" << (H - H.adjoint()).cwiseAbs().maxCoeff() << ")";
    throw NumericalError(os.str());
  }
  energies_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
}

Vector ExactPropagator::evolve(const Vector& psi, double tau) const {
  Vector coeffs = eigenvectors_.adjoint() * psi;
  for (Eigen::Index k = 0; k < coeffs.size(); ++k)
    coeffs(k) *= std::exp(Complex(0.0, -energies_(k) * tau));
  return eigenvectors_ * coeffs;
}

Complex ExactPropagator::operator()(const Vector& w_i, const Vector& w_f, double tau) const {
  if (!std::isfinite(tau)) throw ValidationError("propagation time must be finite");
  return coherent_vector(w_f, basis_).dot(evolve(coherent_vector(w_i, basis_), tau));
}

Complex exact_propagator(const HamiltonianModel& model, const FockBasis& basis, const Vector& w_i,
                         const Vector& w_f, double tau) {
  return ExactPropagator(model, basis)(w_i, w_f, tau);
}

}  // namespace sunsc
