#pragma once

#include <cstdint>
#include <limits>

#include "sunsc/model.hpp"

namespace sunsc {

/// Counter-based generator: draw k of stream s is a pure function of
/// (seed, stream, k), so shards can be evaluated in any order.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix(key_ + counter_++ * 0x9e3779b97f4a7c15ULL); }

  /// Uniform on (0, 1).
  double uniform() { return ((*this)() >> 11) * 0x1.0p-53 + 0x1.0p-54; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  Complex complex_normal();  // E|z|^2 = 1

 private:
  static std::uint64_t mix(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Components with real and imaginary parts uniform in [-scale, scale].
Vector random_vector(CounterRng& rng, int size, double scale = 1.0);
Matrix random_hermitian(CounterRng& rng, int n, double scale = 1.0);

/// Random one-body model (V = 0).
HamiltonianModel random_one_body_model(CounterRng& rng, int n, double scale = 1.0);
/// Random model with a two-body tensor satisfying all index symmetries.
HamiltonianModel random_model(CounterRng& rng, int n, double h_scale = 1.0, double v_scale = 0.3);

}  // namespace sunsc
