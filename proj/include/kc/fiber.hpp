#pragma once

#include <utility>

#include "kc/core.hpp"
#include "kc/functionals.hpp"

namespace kc {

/// zeta(t) = c4 t^4 + c8 t^8 - cp t^ep - cq t^eq, the energy along the
/// dilation family w^t(x) = t w(x / t^2).
struct FiberPolynomial {
  double c4 = 0, c8 = 0, cp = 0, cq = 0;
  double ep = 0, eq = 0;
};

FiberPolynomial fiber_polynomial(const ModelParams& params, const Breakdown& bd);

/// Breakdown of (u^t, v^t) from the breakdown of (u, v).
Breakdown scale_breakdown(const Breakdown& bd, double t, const ModelParams& params);

double fiber_value(const FiberPolynomial& poly, double t);
double fiber_derivative(const FiberPolynomial& poly, double t);
double fiber_second_derivative(const FiberPolynomial& poly, double t);

/// The unique maximizer t* > 0 of zeta. Throws NoNonlocalMass when cp + cq = 0
/// and DegenerateInput when c4 + c8 = 0.
double solve_fiber_max(const FiberPolynomial& poly);

struct Projection {
  double t_star = 1.0;
  Breakdown bd;  ///< scale_breakdown(bd, t_star)
};

/// Scales the breakdown onto the Nehari-Pohozaev manifold J = 0.
Projection project_to_manifold(const Breakdown& bd, const ModelParams& params);

/// (r+alpha+3)/(8r) (1-t^8) - (1 - t^{2(r+alpha+3)})/(2r)
double decomposition_weight(double r, double alpha, double t);

struct DecompositionSides {
  double lhs = 0;  ///< I(u, v)
  double rhs = 0;  ///< I(u^t,v^t) + (1-t^8)/8 J + (1-t^4)^2/4 A + g(p,t) mu D + g(q,t) nu E
};

DecompositionSides decomposition_check(const Breakdown& bd, double t, const ModelParams& params);

} // namespace kc
