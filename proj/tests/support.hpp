#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include "kc/core.hpp"
#include "kc/functionals.hpp"
#include "kc/oracle.hpp"
#include "kc/spectral.hpp"

namespace kct {

inline double rel(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

inline kc::FieldPair smooth_pair(const kc::Grid& g, std::uint64_t seed) {
  return {kc::random_smooth_field(g, 2 * seed + 1), kc::random_smooth_field(g, 2 * seed + 2)};
}

/// Uniform noise in [-1, 1]; rough on purpose for algebraic identities.
inline kc::Field noise(const kc::Grid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  kc::Field f(g);
  for (double& x : f.values())
    x = d(rng);
  return f;
}

inline kc::Field gaussian(const kc::Grid& g, double sigma, double x0 = 0, double y0 = 0,
                          double z0 = 0) {
  return kc::Field::from_function(g, [=](double x, double y, double z) {
    const double r2 = (x - x0) * (x - x0) + (y - y0) * (y - y0) + (z - z0) * (z - z0);
    return std::exp(-r2 / (2 * sigma * sigma));
  });
}

/// Parameters in the given regime with random admissible coefficients.
inline kc::ModelParams random_params(std::mt19937_64& rng, kc::ExponentSpec p, kc::ExponentSpec q) {
  std::uniform_real_distribution<double> c(0.5, 2.0), a(0.3, 2.7), d(0.05, 0.95);
  kc::ModelParams prm;
  prm.a1 = c(rng);
  prm.a2 = c(rng);
  prm.b1 = c(rng);
  prm.b2 = c(rng);
  prm.V1 = c(rng);
  prm.V2 = c(rng);
  prm.mu = c(rng);
  prm.nu = c(rng);
  prm.alpha = a(rng);
  prm.lambda = d(rng) * std::sqrt(prm.V1 * prm.V2);
  prm.p_spec = p;
  prm.q_spec = q;
  return prm;
}

} // namespace kct
