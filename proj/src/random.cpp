#include "sunsc/random.hpp"

#include <cmath>
#include <numbers>

namespace sunsc {

double CounterRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double r = std::sqrt(-2.0 * std::log(uniform()));
  const double phi = 2.0 * std::numbers::pi * uniform();
  spare_ = r * std::sin(phi);
  has_spare_ = true;
  return r * std::cos(phi);
}

Complex CounterRng::complex_normal() {
  const double re = normal();
  const double im = normal();
  return Complex(re, im) / std::sqrt(2.0);
}

Vector random_vector(CounterRng& rng, int size, double scale) {
  Vector x(size);
  for (int i = 0; i < size; ++i) x(i) = Complex(rng.uniform(-scale, scale), rng.uniform(-scale, scale));
  return x;
}

Matrix random_hermitian(CounterRng& rng, int n, double scale) {
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = Complex(rng.uniform(-scale, scale), rng.uniform(-scale, scale));
  return (a + a.adjoint()) / 2.0;
}

HamiltonianModel random_one_body_model(CounterRng& rng, int n, double scale) {
  HamiltonianModel model(n);
  model.h = random_hermitian(rng, n, scale);
  return model;
}

HamiltonianModel random_model(CounterRng& rng, int n, double h_scale, double v_scale) {
  HamiltonianModel model = random_one_body_model(rng, n, h_scale);
  const std::size_t n4 = static_cast<std::size_t>(n) * n * n * n;
  std::vector<Complex> raw(n4);
  for (auto& x : raw) x = Complex(rng.uniform(-v_scale, v_scale), rng.uniform(-v_scale, v_scale));
  auto at = [n](int j, int k, int l, int m) {
    return ((static_cast<std::size_t>(j) * n + k) * n + l) * n + m;
  };
  std::vector<Complex> sym(n4);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m)
          sym[at(j, k, l, m)] = (raw[at(j, k, l, m)] + raw[at(k, j, l, m)] + raw[at(j, k, m, l)] +
                                 raw[at(k, j, m, l)]) /
                                4.0;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m)
          model.v(j, k, l, m) = (sym[at(j, k, l, m)] + std::conj(sym[at(m, l, k, j)])) / 2.0;
  return model;
}

}  // namespace sunsc
