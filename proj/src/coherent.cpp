#include "sunsc/coherent.hpp"

#include <limits>

#include "sunsc/random.hpp"

namespace sunsc {

double IdentityResolutionEstimate::max_sigma_deviation() const {
  double worst = 0.0;
  const auto dim = estimate.rows();
  for (Eigen::Index r = 0; r < dim; ++r)
    for (Eigen::Index c = 0; c < dim; ++c) {
      const Complex dev = estimate(r, c) - (r == c ? 1.0 : 0.0);
      const double parts[2][2] = {{dev.real(), stderr_re(r, c)}, {dev.imag(), stderr_im(r, c)}};
      for (const auto& [delta, sigma] : parts) {
        if (sigma > 0.0)
          worst = std::max(worst, std::abs(delta) / sigma);
        else if (std::abs(delta) > 1e-12)
          return std::numeric_limits<double>::infinity();
      }
    }
  return worst;
}

IdentityResolutionEstimate identity_resolution_mc(int n, int N, std::size_t sample_count,
                                                  std::uint64_t seed, long long dimension_cap) {
  if (sample_count < 10000) throw ValidationError("identity check needs at least 1e4 samples");
  const FockBasis basis(n, N, dimension_cap);
  const auto dim = static_cast<Eigen::Index>(basis.size());
  const double scale = static_cast<double>(dim);

  Matrix sum = Matrix::Zero(dim, dim);
  Eigen::MatrixXd sq_re = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::MatrixXd sq_im = Eigen::MatrixXd::Zero(dim, dim);
  Vector u(n);
  Vector w(n - 1);
  for (std::size_t s = 0; s < sample_count; ++s) {
    CounterRng rng(seed, s);
    for (int j = 0; j < n; ++j) u(j) = rng.complex_normal();
    u /= u.norm();
    w = u.head(n - 1) / u(n - 1);
    const Vector psi = coherent_vector(w, basis);
    const Matrix x = scale * psi * psi.adjoint();
    sum += x;
    sq_re += x.real().cwiseAbs2();
    sq_im += x.imag().cwiseAbs2();
  }
  const double count = static_cast<double>(sample_count);
  IdentityResolutionEstimate out;
  out.samples = sample_count;
  out.estimate = sum / count;
  const Eigen::MatrixXd var_re = (sq_re / count - out.estimate.real().cwiseAbs2()).cwiseMax(0.0);
  const Eigen::MatrixXd var_im = (sq_im / count - out.estimate.imag().cwiseAbs2()).cwiseMax(0.0);
  out.stderr_re = (var_re / (count - 1.0)).cwiseSqrt();
  out.stderr_im = (var_im / (count - 1.0)).cwiseSqrt();
  return out;
}

}  // namespace sunsc
