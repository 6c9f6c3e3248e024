#include "sunsc/model.hpp"

#include <cmath>
#include <sstream>

namespace sunsc {

HamiltonianModel::HamiltonianModel(int modes) : n(modes), h(Matrix::Zero(modes, modes)) {
  if (modes < 2) throw ValidationError("model needs at least two modes");
}

Complex& HamiltonianModel::v(int j, int k, int l, int m) {
  if (V.empty()) V.assign(static_cast<std::size_t>(n) * n * n * n, Complex{});
  return V[((static_cast<std::size_t>(j) * n + k) * n + l) * n + m];
}

bool HamiltonianModel::is_one_body() const {
  for (const auto& x : V)
    if (x != Complex{}) return false;
  return true;
}

void HamiltonianModel::validate(double tol) const {
  if (n < 2) throw ValidationError("model needs at least two modes");
  if (h.rows() != n || h.cols() != n) throw DimensionError("one-body matrix must be n x n");
  const double hscale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > tol * hscale)
    throw ValidationError("one-body matrix h is not Hermitian");
  if (V.empty()) return;
  if (V.size() != static_cast<std::size_t>(n) * n * n * n)
    throw DimensionError("two-body tensor must have n^4 entries");
  double vscale = 1.0;
  for (const auto& x : V) vscale = std::max(vscale, std::abs(x));
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m) {
          const Complex x = v(j, k, l, m);
          const bool ok = std::abs(x - v(k, j, l, m)) <= tol * vscale &&
                          std::abs(x - v(j, k, m, l)) <= tol * vscale &&
                          std::abs(std::conj(x) - v(m, l, k, j)) <= tol * vscale;
          if (!ok) {
            std::ostringstream os;
            os << "two-body tensor breaks index symmetry at (" << j << "," << k << "," << l << ","
               << m << ")";
            throw ValidationError(os.str());
          }
        }
}

HamiltonianModel bose_hubbard_dimer(double J, double U) {
  HamiltonianModel model(2);
  model.h(0, 1) = -J;
  model.h(1, 0) = -J;
  if (U != 0.0) {
    model.v(0, 0, 0, 0) = U;
    model.v(1, 1, 1, 1) = U;
  }
  return model;
}

}  // namespace sunsc
