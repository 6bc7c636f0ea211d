#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "hodgedirac/multivector.hpp"

// Deterministic randomness. mt19937_64 output is pinned by the standard;
// the distributions below are built from raw draws so the same seed gives
// the same stream on every platform.

namespace hodgedirac {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t raw() { return gen_(); }

  // Uniform in [0,1): 53 random mantissa bits.
  double uniform() { return double(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {  // inclusive
    return lo + std::int64_t(gen_() % std::uint64_t(hi - lo + 1));
  }

  // Box-Muller on explicit uniforms.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0;
    while (u1 == 0) u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(6.283185307179586476925287 * u2);
    have_spare_ = true;
    return r * std::cos(6.283185307179586476925287 * u2);
  }

  Multivector multivector(int dim) {
    Multivector w(dim);
    for (unsigned b = 0; b < w.size(); ++b) w[b] = uniform(-1.0, 1.0);
    return w;
  }

  Multivector multivector_of_grade(int dim, int k) {
    return grade_project(multivector(dim), k);
  }

  Multivector vector(int dim) { return multivector_of_grade(dim, 1); }

  Multivector unit_vector(int dim) {
    Multivector v(dim);
    double n = 0;
    while (n < 1e-3) {
      v = vector(dim);
      n = norm(v);
    }
    v *= 1.0 / n;
    return v;
  }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0;
};

}  // namespace hodgedirac
