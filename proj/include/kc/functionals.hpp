#pragma once

#include <nlohmann/json_fwd.hpp>

#include "kc/core.hpp"
#include "kc/riesz.hpp"
#include "kc/spectral.hpp"

namespace kc {

/// The nine integrals through which I, J, P and the fiber map factor.
struct Breakdown {
  double A1 = 0, A2 = 0;  ///< a_i |grad w|_2^2
  double B1 = 0, B2 = 0;  ///< V_i |w|_2^2
  double K1 = 0, K2 = 0;  ///< b_i |grad w|_2^4
  double D = 0;           ///< int (I_alpha * |u|^p) |u|^p
  double E = 0;           ///< int (I_alpha * |v|^q) |v|^q
  double F = 0;           ///< int u v

  double A() const { return A1 + A2; }
  double B() const { return B1 + B2; }
  double K() const { return K1 + K2; }
  /// |(u, v)|^2 in the a_i, V_i weighted H^1 norm.
  double norm_sq() const { return A() + B(); }
};

Breakdown breakdown(const ModelParams& params, const RieszOperator& op, const FieldPair& pair);

/// Breakdown plus the field-level pieces that gradients reuse.
struct Evaluation {
  Breakdown bd;
  double grad_u_sq = 0, grad_v_sq = 0;  ///< |grad u|_2^2, |grad v|_2^2
  Field lap_u, lap_v;
  Field pot_u, pot_v;  ///< I_alpha * |u|^p, I_alpha * |v|^q
};

Evaluation evaluate(const ModelParams& params, const RieszOperator& op, const FieldPair& pair);

/// fibered_gradient from a cached evaluation.
FieldPair fibered_gradient(const ModelParams& params, const Evaluation& ev, const FieldPair& pair,
                           double t);

/// I
double energy(const ModelParams& params, const Breakdown& bd);
/// J, the Nehari-Pohozaev functional
double np_functional(const ModelParams& params, const Breakdown& bd);
/// P, the Pohozaev functional
double pohozaev(const ModelParams& params, const Breakdown& bd);
/// <I'(u,v), (u,v)> written through the breakdown.
double nehari(const ModelParams& params, const Breakdown& bd);
/// I - J/8
double phi_functional(const ModelParams& params, const Breakdown& bd);
/// (1-delta)(p_min+alpha-1)/(2(p_min+alpha+3)) (A + B): the level lower bound
/// that holds on the manifold.
double level_lower_bound(const ModelParams& params, const Breakdown& bd);

/// Strong-form residual of the system, (g_u, g_v); its L2 pairing with a
/// direction is the weak form <I'(u,v), (phi, psi)>.
FieldPair first_variation(const ModelParams& params, const RieszOperator& op, const FieldPair& pair);

/// Gradient of the fibered energy I(u^t, v^t) with t held fixed. t = 1 gives
/// first_variation.
FieldPair fibered_gradient(const ModelParams& params, const RieszOperator& op,
                           const FieldPair& pair, double t);

/// L2 gradient of J, the normal of the manifold J = 0.
FieldPair np_gradient(const ModelParams& params, const Evaluation& ev, const FieldPair& pair);

/// <I'(u,v), (phi, psi)> as an L2 pairing of the strong residual.
double weak_pairing(const FieldPair& variation, const FieldPair& direction);

nlohmann::json diagnostics_json(const ModelParams& params, const Breakdown& bd,
                                double pairing_self);

} // namespace kc
