#include "kc/functionals.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "kc/error.hpp"

namespace kc {

namespace {

// sign(x)|x|^e with 0 -> 0
double signed_power(double x, double e) {
  if (e == 1.0)
    return x;
  return x == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(x), e), x);
}

} // namespace

Evaluation evaluate(const ModelParams& prm, const RieszOperator& op, const FieldPair& pair) {
  require_same_grid(pair.u, pair.v);
  if (!(pair.u.grid() == op.grid()))
    throw GridMismatch("fields and Riesz operator live on different grids");
  Evaluation ev;
  ev.lap_u = laplacian(pair.u);
  ev.lap_v = laplacian(pair.v);
  ev.grad_u_sq = grad_norm_sq(pair.u);
  ev.grad_v_sq = grad_norm_sq(pair.v);
  auto nu_eval = nonlocal_eval(op, pair.u, prm.p());
  auto nv_eval = nonlocal_eval(op, pair.v, prm.q());
  ev.pot_u = std::move(nu_eval.potential);
  ev.pot_v = std::move(nv_eval.potential);

  Breakdown& bd = ev.bd;
  bd.A1 = prm.a1 * ev.grad_u_sq;
  bd.A2 = prm.a2 * ev.grad_v_sq;
  bd.B1 = prm.V1 * l2_norm_sq(pair.u);
  bd.B2 = prm.V2 * l2_norm_sq(pair.v);
  bd.K1 = prm.b1 * ev.grad_u_sq * ev.grad_u_sq;
  bd.K2 = prm.b2 * ev.grad_v_sq * ev.grad_v_sq;
  bd.D = nu_eval.value;
  bd.E = nv_eval.value;
  bd.F = inner(pair.u, pair.v);
  return ev;
}

Breakdown breakdown(const ModelParams& prm, const RieszOperator& op, const FieldPair& pair) {
  return evaluate(prm, op, pair).bd;
}

double energy(const ModelParams& prm, const Breakdown& bd) {
  return 0.5 * bd.A() + 0.5 * bd.B() + 0.25 * bd.K() - prm.mu / (2.0 * prm.p()) * bd.D -
         prm.nu / (2.0 * prm.q()) * bd.E - prm.lambda * bd.F;
}

double np_functional(const ModelParams& prm, const Breakdown& bd) {
  const double p = prm.p(), q = prm.q(), a = prm.alpha;
  return 2.0 * bd.A() + 4.0 * bd.B() + 2.0 * bd.K() - (p + a + 3.0) / p * prm.mu * bd.D -
         (q + a + 3.0) / q * prm.nu * bd.E - 8.0 * prm.lambda * bd.F;
}

double pohozaev(const ModelParams& prm, const Breakdown& bd) {
  const double p = prm.p(), q = prm.q(), a = prm.alpha;
  return 0.5 * bd.A() + 1.5 * bd.B() + 0.5 * bd.K() - (3.0 + a) / (2.0 * p) * prm.mu * bd.D -
         (3.0 + a) / (2.0 * q) * prm.nu * bd.E - 3.0 * prm.lambda * bd.F;
}

double nehari(const ModelParams& prm, const Breakdown& bd) {
  return bd.A() + bd.B() + bd.K() - prm.mu * bd.D - prm.nu * bd.E - 2.0 * prm.lambda * bd.F;
}

double phi_functional(const ModelParams& prm, const Breakdown& bd) {
  const double p = prm.p(), q = prm.q(), a = prm.alpha;
  return 0.25 * bd.A() + (p + a - 1.0) / (8.0 * p) * prm.mu * bd.D +
         (q + a - 1.0) / (8.0 * q) * prm.nu * bd.E;
}

double level_lower_bound(const ModelParams& prm, const Breakdown& bd) {
  const double p = std::min(prm.p(), prm.q());
  const double a = prm.alpha;
  return (1.0 - prm.delta()) * (p + a - 1.0) / (2.0 * (p + a + 3.0)) * bd.norm_sq();
}

FieldPair fibered_gradient(const ModelParams& prm, const Evaluation& ev, const FieldPair& pair,
                           double t) {
  if (!(t > 0.0))
    throw RangeError("fibered_gradient: t must be positive");
  const double t4 = std::pow(t, 4.0), t8 = t4 * t4;
  const double tp = std::pow(t, 2.0 * (prm.p() + prm.alpha + 3.0));
  const double tq = std::pow(t, 2.0 * (prm.q() + prm.alpha + 3.0));
  const double cu = t4 * prm.a1 + t8 * prm.b1 * ev.grad_u_sq;
  const double cv = t4 * prm.a2 + t8 * prm.b2 * ev.grad_v_sq;
  const double p = prm.p(), q = prm.q();

  const Grid& grid = pair.u.grid();
  FieldPair g{Field(grid), Field(grid)};
  const auto u = pair.u.values(), v = pair.v.values();
  const auto lu = ev.lap_u.values(), lv = ev.lap_v.values();
  const auto wu = ev.pot_u.values(), wv = ev.pot_v.values();
  auto gu = g.u.values(), gv = g.v.values();
  const auto n = static_cast<long long>(u.size());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i) {
    gu[i] = -cu * lu[i] + t8 * prm.V1 * u[i] - prm.mu * tp * wu[i] * signed_power(u[i], p - 1.0) -
            prm.lambda * t8 * v[i];
    gv[i] = -cv * lv[i] + t8 * prm.V2 * v[i] - prm.nu * tq * wv[i] * signed_power(v[i], q - 1.0) -
            prm.lambda * t8 * u[i];
  }
  return g;
}

FieldPair fibered_gradient(const ModelParams& prm, const RieszOperator& op, const FieldPair& pair,
                           double t) {
  return fibered_gradient(prm, evaluate(prm, op, pair), pair, t);
}

FieldPair first_variation(const ModelParams& prm, const RieszOperator& op, const FieldPair& pair) {
  return fibered_gradient(prm, op, pair, 1.0);
}

FieldPair np_gradient(const ModelParams& prm, const Evaluation& ev, const FieldPair& pair) {
  const double cu = 4.0 * prm.a1 + 8.0 * prm.b1 * ev.grad_u_sq;
  const double cv = 4.0 * prm.a2 + 8.0 * prm.b2 * ev.grad_v_sq;
  // d/du of (p+alpha+3)/p mu D is 2(p+alpha+3) mu (I*|u|^p) |u|^{p-2} u
  const double kp = 2.0 * (prm.p() + prm.alpha + 3.0) * prm.mu;
  const double kq = 2.0 * (prm.q() + prm.alpha + 3.0) * prm.nu;
  const double p = prm.p(), q = prm.q();

  FieldPair g{Field(pair.u.grid()), Field(pair.u.grid())};
  const auto u = pair.u.values(), v = pair.v.values();
  const auto lu = ev.lap_u.values(), lv = ev.lap_v.values();
  const auto wu = ev.pot_u.values(), wv = ev.pot_v.values();
  auto gu = g.u.values(), gv = g.v.values();
  const auto n = static_cast<long long>(u.size());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i) {
    gu[i] = -cu * lu[i] + 8.0 * prm.V1 * u[i] - kp * wu[i] * signed_power(u[i], p - 1.0) -
            8.0 * prm.lambda * v[i];
    gv[i] = -cv * lv[i] + 8.0 * prm.V2 * v[i] - kq * wv[i] * signed_power(v[i], q - 1.0) -
            8.0 * prm.lambda * u[i];
  }
  return g;
}

double weak_pairing(const FieldPair& variation, const FieldPair& direction) {
  return inner(variation, direction);
}

nlohmann::json diagnostics_json(const ModelParams& prm, const Breakdown& bd, double pairing_self) {
  return {{"A1", bd.A1},
          {"A2", bd.A2},
          {"B1", bd.B1},
          {"B2", bd.B2},
          {"K1", bd.K1},
          {"K2", bd.K2},
          {"D", bd.D},
          {"E", bd.E},
          {"F", bd.F},
          {"I", energy(prm, bd)},
          {"J", np_functional(prm, bd)},
          {"P", pohozaev(prm, bd)},
          {"pairing_self", pairing_self}};
}

} // namespace kc
