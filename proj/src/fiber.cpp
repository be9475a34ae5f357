#include "kc/fiber.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kc/error.hpp"

namespace kc {

FiberPolynomial fiber_polynomial(const ModelParams& prm, const Breakdown& bd) {
  const double p = prm.p(), q = prm.q(), a = prm.alpha;
  FiberPolynomial poly;
  poly.c4 = 0.5 * bd.A();
  poly.c8 = 0.5 * bd.B() + 0.25 * bd.K() - prm.lambda * bd.F;
  poly.cp = prm.mu / (2.0 * p) * bd.D;
  poly.cq = prm.nu / (2.0 * q) * bd.E;
  poly.ep = 2.0 * (p + a + 3.0);
  poly.eq = 2.0 * (q + a + 3.0);
  return poly;
}

Breakdown scale_breakdown(const Breakdown& bd, double t, const ModelParams& prm) {
  if (!(t > 0.0) || !std::isfinite(t))
    throw RangeError("scale_breakdown: t must be positive");
  const double t4 = std::pow(t, 4.0), t8 = t4 * t4;
  Breakdown out = bd;
  out.A1 *= t4;
  out.A2 *= t4;
  out.B1 *= t8;
  out.B2 *= t8;
  out.K1 *= t8;
  out.K2 *= t8;
  out.F *= t8;
  out.D *= std::pow(t, 2.0 * (prm.p() + prm.alpha + 3.0));
  out.E *= std::pow(t, 2.0 * (prm.q() + prm.alpha + 3.0));
  return out;
}

namespace {

void require_t(double t) {
  if (!(t > 0.0) || !std::isfinite(t))
    throw RangeError("fiber: t must be positive and finite");
}

// phi(t) = zeta'(t) / t^3 and its derivative.
double phi(const FiberPolynomial& c, double t) {
  const double t4 = std::pow(t, 4.0);
  return 4.0 * c.c4 + 8.0 * c.c8 * t4 - c.ep * c.cp * std::pow(t, c.ep - 4.0) -
         c.eq * c.cq * std::pow(t, c.eq - 4.0);
}

double phi_prime(const FiberPolynomial& c, double t) {
  return 32.0 * c.c8 * t * t * t - c.ep * (c.ep - 4.0) * c.cp * std::pow(t, c.ep - 5.0) -
         c.eq * (c.eq - 4.0) * c.cq * std::pow(t, c.eq - 5.0);
}

double phi_scale(const FiberPolynomial& c, double t) {
  return std::max({4.0 * std::abs(c.c4), 8.0 * std::abs(c.c8) * std::pow(t, 4.0),
                   c.ep * c.cp * std::pow(t, c.ep - 4.0), c.eq * c.cq * std::pow(t, c.eq - 4.0)});
}

} // namespace

double fiber_value(const FiberPolynomial& c, double t) {
  require_t(t);
  const double t4 = std::pow(t, 4.0);
  return c.c4 * t4 + c.c8 * t4 * t4 - c.cp * std::pow(t, c.ep) - c.cq * std::pow(t, c.eq);
}

double fiber_derivative(const FiberPolynomial& c, double t) {
  require_t(t);
  return 4.0 * c.c4 * t * t * t + 8.0 * c.c8 * std::pow(t, 7.0) -
         c.ep * c.cp * std::pow(t, c.ep - 1.0) - c.eq * c.cq * std::pow(t, c.eq - 1.0);
}

double fiber_second_derivative(const FiberPolynomial& c, double t) {
  require_t(t);
  return 12.0 * c.c4 * t * t + 56.0 * c.c8 * std::pow(t, 6.0) -
         c.ep * (c.ep - 1.0) * c.cp * std::pow(t, c.ep - 2.0) -
         c.eq * (c.eq - 1.0) * c.cq * std::pow(t, c.eq - 2.0);
}

double solve_fiber_max(const FiberPolynomial& c) {
  if (!(c.cp + c.cq > 0.0))
    throw NoNonlocalMass("fiber polynomial has no nonlocal part; zeta increases without bound");
  if (!(c.c4 + c.c8 > 0.0))
    throw DegenerateInput("fiber polynomial has no positive quadratic/quartic part");
  if (!(c.ep > 8.0) || !(c.eq > 8.0))
    throw RangeError("fiber exponents must exceed 8");

  double lo = std::min(1.0, c.c4 / (c.ep * c.cp + c.eq * c.cq + c.c8));
  if (!(lo > 0.0))
    lo = 1.0;
  for (int i = 0; phi(c, lo) <= 0.0; ++i) {
    if (i > 4000)
      throw DegenerateInput("could not bracket the fiber maximizer from below");
    lo *= 0.5;
  }
  double hi = std::max(1.0, lo);
  for (int i = 0; phi(c, hi) >= 0.0; ++i) {
    if (i > 64)
      throw Overflow("fiber maximizer lies beyond 2^64");
    hi *= 2.0;
  }

  // Safeguarded Newton on phi; phi is decreasing through its unique root.
  double t = 0.5 * (lo + hi);
  for (int it = 0; it < 300; ++it) {
    const double f = phi(c, t);
    if (std::abs(f) <= 1e-13 * phi_scale(c, t))
      return t;
    if (f > 0.0)
      lo = t;
    else
      hi = t;
    const double d = phi_prime(c, t);
    double next = d < 0.0 ? t - f / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi))
      next = 0.5 * (lo + hi);
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi)
      return next;
    t = next;
  }
  return t;
}

Projection project_to_manifold(const Breakdown& bd, const ModelParams& prm) {
  Projection out;
  out.t_star = solve_fiber_max(fiber_polynomial(prm, bd));
  out.bd = scale_breakdown(bd, out.t_star, prm);
  return out;
}

double decomposition_weight(double r, double alpha, double t) {
  require_t(t);
  const double e = r + alpha + 3.0;
  return e / (8.0 * r) * (1.0 - std::pow(t, 8.0)) - (1.0 - std::pow(t, 2.0 * e)) / (2.0 * r);
}

DecompositionSides decomposition_check(const Breakdown& bd, double t, const ModelParams& prm) {
  require_t(t);
  const double one_t4 = 1.0 - std::pow(t, 4.0);
  DecompositionSides s;
  s.lhs = energy(prm, bd);
  s.rhs = energy(prm, scale_breakdown(bd, t, prm)) +
          (1.0 - std::pow(t, 8.0)) / 8.0 * np_functional(prm, bd) + one_t4 * one_t4 / 4.0 * bd.A() +
          decomposition_weight(prm.p(), prm.alpha, t) * prm.mu * bd.D +
          decomposition_weight(prm.q(), prm.alpha, t) * prm.nu * bd.E;
  return s;
}

} // namespace kc
