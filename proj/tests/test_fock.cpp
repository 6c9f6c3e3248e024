#include <doctest.h>

#include <cmath>

#include "sunsc/coherent.hpp"
#include "sunsc/fock.hpp"
#include "sunsc/random.hpp"

using namespace sunsc;

namespace {

Vector vec(std::initializer_list<Complex> xs) {
  Vector v(xs.size());
  Eigen::Index i = 0;
  for (auto x : xs) v(i++) = x;
  return v;
}

}  // namespace

TEST_CASE("basis enumeration") {
  const FockBasis b(2, 3);
  REQUIRE(b.size() == 4);
  CHECK(b.state(0) == FockBasis::Occupation{3, 0});
  CHECK(b.state(1) == FockBasis::Occupation{2, 1});
  CHECK(b.state(2) == FockBasis::Occupation{1, 2});
  CHECK(b.state(3) == FockBasis::Occupation{0, 3});
  CHECK(FockBasis(3, 2).size() == 6);

  const FockBasis vac(2, 0);
  REQUIRE(vac.size() == 1);
  CHECK(vac.state(0) == FockBasis::Occupation{0, 0});
}

TEST_CASE("basis invariants") {
  for (int n = 2; n <= 5; ++n)
    for (int N = 0; N <= 7; ++N) {
      const FockBasis b(n, N);
      CHECK(static_cast<long long>(b.size()) == fock_dimension(n, N));
      for (std::size_t i = 0; i < b.size(); ++i) {
        int sum = 0;
        for (int m : b.state(i)) {
          CHECK(m >= 0);
          sum += m;
        }
        CHECK(sum == N);
        CHECK(b.index(b.state(i)) == i);
        if (i > 0) CHECK(b.state(i - 1) > b.state(i));
      }
    }
  CHECK(fock_dimension(4, 6) == 84);
  CHECK_THROWS_AS(FockBasis(1, 3), ValidationError);
  CHECK(FockBasis(2, 3).index({1, 1}) == 4);
}

TEST_CASE("dimension cap") {
  CHECK_THROWS_AS(FockBasis(6, 30, 1000), CapacityError);
  try {
    FockBasis(3, 100, 10);
  } catch (const CapacityError& e) {
    CHECK(e.required() == 5151);
  }
}

TEST_CASE("hamiltonian matrix examples") {
  HamiltonianModel hop(2);
  hop.h << 0, -1, -1, 0;
  const Matrix H1 = hamiltonian_matrix(hop, FockBasis(2, 1));
  CHECK((H1 - hop.h).norm() < 1e-15);

  HamiltonianModel onsite(2);
  onsite.v(0, 0, 0, 0) = 2.5;
  onsite.v(1, 1, 1, 1) = 2.5;
  const Matrix H2 = hamiltonian_matrix(onsite, FockBasis(2, 2));
  Matrix expected = Matrix::Zero(3, 3);
  expected.diagonal() << 2.5, 0.0, 2.5;
  CHECK((H2 - expected).norm() < 1e-15);

  CHECK_THROWS_AS(hamiltonian_matrix(hop, FockBasis(3, 1)), DimensionError);
}

TEST_CASE("hamiltonian matrix is hermitian") {
  CounterRng rng(11);
  for (int n = 2; n <= 4; ++n) {
    const auto m = random_model(rng, n);
    const Matrix H = hamiltonian_matrix(m, FockBasis(n, 4));
    CHECK((H - H.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("number operator and bose-hubbard spectrum") {
  HamiltonianModel number(3);
  number.h = Matrix::Identity(3, 3);
  const Matrix H = hamiltonian_matrix(number, FockBasis(3, 5));
  CHECK((H - 5.0 * Matrix::Identity(H.rows(), H.cols())).norm() < 1e-13);

  // U = 0 dimer: single-particle energies -J, +J, so N bosons span [-NJ, NJ].
  const ExactPropagator ex(bose_hubbard_dimer(1.0, 0.0), FockBasis(2, 4));
  for (int k = 0; k <= 4; ++k) CHECK(ex.energies()(k) == doctest::Approx(-4.0 + 2.0 * k));
}

TEST_CASE("coherent vector examples") {
  SUBCASE("w = 0 is the highest-weight state") {
    const FockBasis b(3, 4);
    const Vector psi = coherent_vector(Vector::Zero(2), b);
    const std::size_t last = b.index({0, 0, 4});
    for (std::size_t i = 0; i < b.size(); ++i)
      CHECK(std::abs(psi(i) - (i == last ? 1.0 : 0.0)) < 1e-15);
  }
  SUBCASE("n=2, N=1, w=1") {
    const Vector psi = coherent_vector(vec({1.0}), FockBasis(2, 1));
    CHECK(std::abs(psi(0) - M_SQRT1_2) < 1e-15);
    CHECK(std::abs(psi(1) - M_SQRT1_2) < 1e-15);
  }
  SUBCASE("n=2, N=2, w=i") {
    const Vector psi = coherent_vector(vec({kI}), FockBasis(2, 2));
    CHECK(std::abs(psi(0) - Complex(-0.5)) < 1e-15);
    CHECK(std::abs(psi(1) - Complex(0, M_SQRT1_2)) < 1e-15);
    CHECK(std::abs(psi(2) - Complex(0.5)) < 1e-15);
  }
}

TEST_CASE("coherent vector normalization") {
  CounterRng rng(12);
  for (int k = 0; k < 100; ++k) {
    const int n = 2 + k % 3;
    const Vector w = random_vector(rng, n - 1, 5.0 / std::sqrt(2.0));
    const Vector psi = coherent_vector(w, FockBasis(n, 1 + k % 6));
    CHECK(std::abs(psi.norm() - 1.0) < 1e-12);
  }
  // Large N stays finite.
  const Vector psi = coherent_vector(vec({Complex(0.7, -0.2)}), FockBasis(2, 400));
  CHECK(std::abs(psi.norm() - 1.0) < 1e-12);
}

TEST_CASE("overlap_exact") {
  const FockBasis b(2, 2);
  CHECK(std::abs(overlap_exact(Vector::Zero(1), vec({1.0}), b) - 0.5) < 1e-15);
  CounterRng rng(13);
  for (int k = 0; k < 50; ++k) {
    const int n = 2 + k % 3;
    const int N = 1 + k % 6;
    const FockBasis basis(n, N);
    const Vector a = random_vector(rng, n - 1), c = random_vector(rng, n - 1);
    CHECK(std::abs(overlap_exact(a, a, basis) - 1.0) < 1e-12);
    const Complex o = overlap_exact(a, c, basis);
    CHECK(std::abs(o) <= 1.0 + 1e-14);
    CHECK(std::abs(o - overlap(a, c, N)) < 1e-12);
  }
}

TEST_CASE("effective hamiltonian oracle examples") {
  HamiltonianModel number(3);
  number.h = Matrix::Identity(3, 3);
  CounterRng rng(14);
  const FockBasis b3(3, 4);
  const Vector wbar = random_vector(rng, 2), w = random_vector(rng, 2);
  CHECK(std::abs(effective_hamiltonian_oracle(number, b3, wbar, w) - 4.0) < 1e-12);

  HamiltonianModel occ(2);
  occ.h(0, 0) = 1.0;
  CHECK(std::abs(effective_hamiltonian_oracle(occ, FockBasis(2, 1), vec({1.0}), vec({1.0})) - 0.5) <
        1e-15);

  auto m = random_one_body_model(rng, 3);
  CHECK(std::abs(effective_hamiltonian_oracle(m, b3, Vector::Zero(2), Vector::Zero(2)) - 4.0 * m.h(2, 2)) <
        1e-12);

  // 1 + wbar.w = 0
  CHECK_THROWS_AS(effective_hamiltonian_oracle(m, b3, vec({1.0, 0.0}), vec({-1.0, 0.0})),
                  SingularityError);
}

TEST_CASE("exact propagator examples") {
  CounterRng rng(15);
  SUBCASE("H = 0 reduces to the overlap") {
    const HamiltonianModel zero(3);
    const FockBasis b(3, 3);
    const Vector wi = random_vector(rng, 2), wf = random_vector(rng, 2);
    CHECK(std::abs(exact_propagator(zero, b, wi, wf, 1.7) - overlap(wf, wi, 3)) < 1e-13);
  }
  SUBCASE("two-level closed form") {
    const double omega = 1.3, tau = 0.8;
    HamiltonianModel m(2);
    m.h(0, 0) = omega;
    const Vector wi = vec({Complex(0.4, 0.3)}), wf = vec({Complex(-0.2, 0.9)});
    const Complex expected = (1.0 + std::conj(wf(0)) * wi(0) * std::exp(-kI * omega * tau)) /
                             std::sqrt((1.0 + std::norm(wf(0))) * (1.0 + std::norm(wi(0))));
    CHECK(std::abs(exact_propagator(m, FockBasis(2, 1), wi, wf, tau) - expected) < 1e-14);
  }
  SUBCASE("tau = 0") {
    const auto m = random_model(rng, 3);
    const FockBasis b(3, 4);
    const Vector wi = random_vector(rng, 2), wf = random_vector(rng, 2);
    CHECK(std::abs(exact_propagator(m, b, wi, wf, 0.0) - overlap(wf, wi, 4)) < 1e-12);
  }
}

TEST_CASE("exact propagation is unitary and composes") {
  CounterRng rng(16);
  const auto m = random_model(rng, 3);
  const FockBasis b(3, 4);
  const ExactPropagator ex(m, b);
  const Eigen::Index dim = static_cast<Eigen::Index>(b.size());
  Matrix U(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) U.col(j) = ex.evolve(Vector::Unit(dim, j), 0.9);
  CHECK((U.adjoint() * U - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff() < 1e-12);

  const Vector wi = random_vector(rng, 2), wf = random_vector(rng, 2);
  const Vector psi = ex.evolve(ex.evolve(coherent_vector(wi, b), 0.4), 0.5);
  const Complex composed = coherent_vector(wf, b).dot(psi);
  CHECK(std::abs(composed - ex(wi, wf, 0.9)) < 1e-9);
}
