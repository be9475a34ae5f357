#include "kc/minimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include <nlohmann/json.hpp>

#include "kc/error.hpp"

namespace kc {

void SolverConfig::validate() const {
  if (max_iters < 0)
    throw ConfigError("max_iters must be nonnegative");
  if (!(grad_tol > 0.0) || !(nehari_tol > 0.0))
    throw ConfigError("tolerances must be positive");
  if (!(step0 > 0.0))
    throw ConfigError("step0 must be positive");
  if (!(armijo_c > 0.0 && armijo_c < 1.0) || !(armijo_shrink > 0.0 && armijo_shrink < 1.0))
    throw ConfigError("Armijo constants must lie in (0, 1)");
  if (symmetrize_every < 1)
    throw ConfigError("symmetrize_every must be at least 1");
}

ReducedEval reduced_value_and_gradient(const ModelParams& prm, const RieszOperator& op,
                                       const FieldPair& pair) {
  const Evaluation ev = evaluate(prm, op, pair);
  const FiberPolynomial poly = fiber_polynomial(prm, ev.bd);
  ReducedEval out;
  out.t_star = solve_fiber_max(poly);
  out.M = fiber_value(poly, out.t_star);
  out.grad = fibered_gradient(prm, ev, pair, out.t_star);
  return out;
}

double reduced_value(const ModelParams& prm, const RieszOperator& op, const FieldPair& pair) {
  const FiberPolynomial poly = fiber_polynomial(prm, breakdown(prm, op, pair));
  return fiber_value(poly, solve_fiber_max(poly));
}

Breakdown scale_amplitude(const Breakdown& bd, double c, const ModelParams& prm) {
  const double c2 = c * c;
  Breakdown out = bd;
  out.A1 *= c2;
  out.A2 *= c2;
  out.B1 *= c2;
  out.B2 *= c2;
  out.F *= c2;
  out.K1 *= c2 * c2;
  out.K2 *= c2 * c2;
  out.D *= std::pow(std::abs(c), 2.0 * prm.p());
  out.E *= std::pow(std::abs(c), 2.0 * prm.q());
  return out;
}

double manifold_amplitude(const Breakdown& bd, const ModelParams& prm) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto J = [&](double c) { return np_functional(prm, scale_amplitude(bd, c, prm)); };
  const double j1 = J(1.0);
  if (!std::isfinite(j1))
    return nan;
  if (j1 == 0.0)
    return 1.0;
  // Walk away from c = 1 until J changes sign, then bisect.
  double lo = 1.0, hi = 1.0;
  const double factor = 1.25;
  if (j1 > 0.0) {
    while (J(hi) > 0.0) {
      lo = hi;
      hi *= factor;
      if (hi > 1e8)
        return nan;
    }
  } else {
    while (J(lo) < 0.0) {
      hi = lo;
      lo /= factor;
      if (lo < 1e-8)
        return nan;
    }
  }
  // J(lo) > 0 >= J(hi) in both branches
  for (int it = 0; it < 200 && hi - lo > 2.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (J(mid) > 0.0 ? lo : hi) = mid;
  }
  const double jl = J(lo), jh = J(hi);
  return std::abs(jl) <= std::abs(jh) ? lo : hi;
}

namespace {

void scale_pair(FieldPair& pair, double c) {
  pair.u *= c;
  pair.v *= c;
}

// Evaluation of (c u, c v) from that of (u, v).
void scale_evaluation(Evaluation& ev, double c, const ModelParams& prm) {
  ev.bd = scale_amplitude(ev.bd, c, prm);
  ev.grad_u_sq *= c * c;
  ev.grad_v_sq *= c * c;
  ev.lap_u *= c;
  ev.lap_v *= c;
  ev.pot_u *= std::pow(std::abs(c), prm.p());
  ev.pot_v *= std::pow(std::abs(c), prm.q());
}

void symmetrize(FieldPair& pair) {
  for (double& x : pair.u.values())
    x = std::abs(x);
  for (double& x : pair.v.values())
    x = std::abs(x);
}

double norm(const FieldPair& a) { return std::sqrt(inner(a, a)); }

struct Preconditioner {
  double cu, cv, mu_, mv_;
  FieldPair apply(const FieldPair& g) const {
    return {solve_screened(g.u, cu, mu_), solve_screened(g.v, cv, mv_)};
  }
};

// H^1-type metric of the fibered quadratic part at t.
Preconditioner preconditioner(const ModelParams& prm, const Evaluation& ev, double t) {
  const double t4 = std::pow(t, 4.0), t8 = t4 * t4;
  return {t4 * prm.a1 + t8 * prm.b1 * ev.grad_u_sq, t4 * prm.a2 + t8 * prm.b2 * ev.grad_v_sq,
          t8 * prm.V1, t8 * prm.V2};
}

Residuals residuals_from(const ModelParams& prm, const Evaluation& ev, const FieldPair& pair,
                         double m) {
  Residuals r;
  const Breakdown& bd = ev.bd;
  r.scale = bd.norm_sq();
  const double fn = norm(pair);
  r.strong_scale = fn > 0.0 ? r.scale / fn : 0.0;
  r.nehari = std::abs(nehari(prm, bd));
  r.pohozaev = std::abs(pohozaev(prm, bd));
  r.np = std::abs(np_functional(prm, bd));
  const FieldPair fv = fibered_gradient(prm, ev, pair, 1.0);
  r.strong = norm(fv);
  const FieldPair jg = np_gradient(prm, ev, pair);
  const double jj = inner(jg, jg);
  r.multiplier = jj > 0.0 ? inner(jg, fv) / jj : 0.0;
  FieldPair tang = fv;
  tang.axpy(-r.multiplier, jg);
  r.tangential = norm(tang);
  r.lower_bound_slack = m - level_lower_bound(prm, bd);
  return r;
}

void require_solvable(const ModelParams& prm) {
  const ExponentRegime regime = validate_params(prm);
  if (!solvable(regime))
    throw RegimeError("no ground state is sought in the " + std::string(to_string(regime)) +
                      " regime");
}

} // namespace

FieldPair initial_pair(const ModelParams& prm, const RieszOperator& op, const SolverConfig& cfg) {
  const Grid& grid = op.grid();
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  double dir[3];
  double len = 0.0;
  do {
    for (double& d : dir)
      d = normal(rng);
    len = std::sqrt(dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]);
  } while (len < 1e-3);
  const double sigma = grid.L / 8.0, off = grid.L / 16.0;
  double cx[3], cy[3];
  for (int k = 0; k < 3; ++k) {
    cx[k] = off * dir[k] / len;
    cy[k] = -cx[k];
  }
  // t G(x / t^2), sampled exactly: the dilation acts on the analytic profile.
  auto profile = [&](double t) {
    const double s2 = t * t;
    auto gauss = [&](const double* c) {
      return Field::from_function(grid, [&, c](double x, double y, double z) {
        const double dx = x / s2 - c[0], dy = y / s2 - c[1], dz = z / s2 - c[2];
        return t * std::exp(-(dx * dx + dy * dy + dz * dz) / (2.0 * sigma * sigma));
      });
    };
    return FieldPair{gauss(cx), gauss(cy)};
  };

  double t = 1.0;
  FieldPair pair = profile(t);
  Breakdown bd = breakdown(prm, op, pair);
  for (int it = 0; it < 80; ++it) {
    const double ts = solve_fiber_max(fiber_polynomial(prm, bd));
    if (std::abs(ts - 1.0) < 1e-6)
      break;
    t *= std::pow(ts, 0.7);
    pair = profile(t);
    bd = breakdown(prm, op, pair);
  }
  const double c = manifold_amplitude(bd, prm);
  if (!std::isfinite(c))
    throw DegenerateInput("could not place the initial pair on the manifold");
  scale_pair(pair, c);
  return pair;
}

Residuals compute_residuals(const ModelParams& prm, const RieszOperator& op, const FieldPair& pair,
                            double* m_out, double* t_star_out) {
  const Evaluation ev = evaluate(prm, op, pair);
  const FiberPolynomial poly = fiber_polynomial(prm, ev.bd);
  const double ts = solve_fiber_max(poly);
  const double m = fiber_value(poly, ts);
  if (m_out)
    *m_out = m;
  if (t_star_out)
    *t_star_out = ts;
  Residuals r = residuals_from(prm, ev, pair, m);
  r.lower_bound_slack = m - level_lower_bound(prm, scale_breakdown(ev.bd, ts, prm));
  return r;
}

GroundStateResult minimize_ground_state(const ModelParams& prm, const Grid& grid,
                                        const SolverConfig& cfg) {
  require_solvable(prm);
  const RieszOperator op = build_riesz(grid, prm.alpha);
  return minimize_ground_state(prm, op, cfg);
}

GroundStateResult minimize_ground_state(const ModelParams& prm, const RieszOperator& op,
                                        const SolverConfig& cfg, const FieldPair* start) {
  require_solvable(prm);
  cfg.validate();
  if (std::abs(op.alpha() - prm.alpha) > 0.0)
    throw RangeError("Riesz operator built for a different alpha");

  FieldPair pair;
  if (start) {
    require_same_grid(start->u, start->v);
    if (!(start->u.grid() == op.grid()))
      throw GridMismatch("start pair and operator grids differ");
    pair = *start;
    const double c = manifold_amplitude(breakdown(prm, op, pair), prm);
    if (std::isfinite(c))
      scale_pair(pair, c);
    else
      pair = initial_pair(prm, op, cfg);
  } else {
    pair = initial_pair(prm, op, cfg);
  }

  GroundStateResult res;
  Evaluation ev = evaluate(prm, op, pair);
  double step = cfg.step0;
  const double step_max = 1e3 * cfg.step0;

  auto finish = [&](int iters, const std::string& reason) {
    const FiberPolynomial poly = fiber_polynomial(prm, ev.bd);
    res.t_star = solve_fiber_max(poly);
    res.m = fiber_value(poly, res.t_star);
    res.breakdown = ev.bd;
    res.residuals = residuals_from(prm, ev, pair, res.m);
    res.residuals.lower_bound_slack =
        res.m - level_lower_bound(prm, scale_breakdown(ev.bd, res.t_star, prm));
    res.iterations = iters;
    res.converged = res.residuals.np <= cfg.nehari_tol * res.residuals.scale &&
                    res.residuals.strong <= cfg.grad_tol * res.residuals.strong_scale &&
                    res.m > 0.0;
    res.stop_reason = reason;
    res.pair = std::move(pair);
    return std::move(res);
  };

  for (int it = 0; it < cfg.max_iters; ++it) {
    if (cfg.positivity && it > 0 && it % cfg.symmetrize_every == 0) {
      FieldPair sym = pair;
      symmetrize(sym);
      Evaluation sev = evaluate(prm, op, sym);
      const double c = manifold_amplitude(sev.bd, prm);
      if (std::isfinite(c)) {
        scale_pair(sym, c);
        scale_evaluation(sev, c, prm);
        pair = std::move(sym);
        ev = std::move(sev);
      }
    }

    const FiberPolynomial poly = fiber_polynomial(prm, ev.bd);
    const double ts = solve_fiber_max(poly);
    const double M = fiber_value(poly, ts);
    const FieldPair g = fibered_gradient(prm, ev, pair, ts);
    const Residuals r = residuals_from(prm, ev, pair, M);

    IterationRecord rec;
    rec.iter = it;
    rec.M = M;
    rec.J_res = r.scale > 0.0 ? r.np / r.scale : 0.0;
    rec.strong_res = r.strong_scale > 0.0 ? r.strong / r.strong_scale : 0.0;
    rec.t_star = ts;

    if (r.np <= cfg.nehari_tol * r.scale && r.strong <= cfg.grad_tol * r.strong_scale) {
      res.history.push_back(rec);
      res.stationary = true;
      return finish(it, "residuals below tolerance");
    }
    if (r.tangential <= cfg.grad_tol * r.strong_scale) {
      res.history.push_back(rec);
      res.stationary = true;
      return finish(it, "stationary on the manifold");
    }

    // Descent direction: preconditioned envelope gradient with its component
    // along the manifold normal removed.
    const Preconditioner pc = preconditioner(prm, ev, ts);
    const FieldPair jg = np_gradient(prm, ev, pair);
    const FieldPair Pg = pc.apply(g);
    const FieldPair PJ = pc.apply(jg);
    const double jpj = inner(jg, PJ);
    const double eta = jpj > 0.0 ? inner(jg, Pg) / jpj : 0.0;
    FieldPair d = PJ;
    d.u *= eta;
    d.v *= eta;
    d.axpy(-1.0, Pg);
    const double slope = inner(g, d);
    if (!(slope < 0.0)) {
      rec.step = 0.0;
      res.history.push_back(rec);
      return finish(it, "no descent direction");
    }

    double a = step;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls, a *= cfg.armijo_shrink) {
      FieldPair trial = pair;
      trial.axpy(a, d);
      Evaluation tev = evaluate(prm, op, trial);
      const double c = manifold_amplitude(tev.bd, prm);
      if (!std::isfinite(c))
        continue;
      scale_evaluation(tev, c, prm);
      const FiberPolynomial tp = fiber_polynomial(prm, tev.bd);
      double Mt;
      try {
        Mt = fiber_value(tp, solve_fiber_max(tp));
      } catch (const Error&) {
        continue;
      }
      if (Mt <= M + cfg.armijo_c * a * slope) {
        scale_pair(trial, c);
        pair = std::move(trial);
        ev = std::move(tev);
        accepted = true;
        break;
      }
    }
    rec.step = accepted ? a : 0.0;
    res.history.push_back(rec);
    if (!accepted)
      return finish(it + 1, "line search stalled");
    step = std::min(a / cfg.armijo_shrink, step_max);
  }
  return finish(cfg.max_iters, "iteration limit");
}

double boundary_ratio(const FieldPair& pair) {
  const Grid& g = pair.u.grid();
  const int n = g.n;
  double peak = std::max(pair.u.max_abs(), pair.v.max_abs());
  if (!(peak > 0.0))
    return 0.0;
  double edge = 0.0;
  // The periodic cell's outer faces are the index-0 planes.
  for (const Field* f : {&pair.u, &pair.v})
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        edge = std::max({edge, std::abs(f->at(0, a, b)), std::abs(f->at(a, 0, b)),
                         std::abs(f->at(a, b, 0))});
  return edge / peak;
}

bool VerificationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

const Check* VerificationReport::find(const std::string& name) const {
  for (const Check& c : checks)
    if (c.name == name)
      return &c;
  return nullptr;
}

VerificationReport verify_solution(const ModelParams& prm, const RieszOperator& op,
                                   const GroundStateResult& result, const SolverConfig& cfg) {
  VerificationReport rep;
  const FieldPair& pair = result.pair;
  auto add = [&](std::string name, bool ok, double value, double bound) {
    rep.checks.push_back({std::move(name), ok, value, bound});
  };

  const double nu = std::sqrt(l2_norm_sq(pair.u)), nv = std::sqrt(l2_norm_sq(pair.v));
  const bool finite = pair.u.all_finite() && pair.v.all_finite();
  add("finite", finite, finite ? 0.0 : 1.0, 0.0);
  add("nontrivial", nu + nv > 0.0, nu + nv, 0.0);
  if (!finite || !(nu + nv > 0.0))
    return rep;

  try {
    rep.residuals = compute_residuals(prm, op, pair, &rep.m, &rep.t_star);
  } catch (const Error&) {
    add("fiber_projection", false, 0.0, 0.0);
    return rep;
  }
  const Residuals& r = rep.residuals;
  add("np", r.np <= cfg.nehari_tol * r.scale, r.np, cfg.nehari_tol * r.scale);
  add("nehari", r.nehari <= cfg.grad_tol * r.scale, r.nehari, cfg.grad_tol * r.scale);
  add("strong", r.strong <= cfg.grad_tol * r.strong_scale, r.strong,
      cfg.grad_tol * r.strong_scale);
  add("lower_bound", r.lower_bound_slack >= -cfg.nehari_tol * r.scale, r.lower_bound_slack,
      -cfg.nehari_tol * r.scale);
  add("m_positive", rep.m > 0.0, rep.m, 0.0);
  add("both_components", std::min(nu, nv) > 0.01 * std::max(nu, nv), std::min(nu, nv),
      0.01 * std::max(nu, nv));
  if (cfg.positivity) {
    double lo = std::numeric_limits<double>::infinity();
    for (const Field* f : {&pair.u, &pair.v})
      for (double x : f->values())
        lo = std::min(lo, x);
    add("positive", lo > 0.0, lo, 0.0);
  }
  rep.boundary_ratio = boundary_ratio(pair);
  add("boundary_decay", rep.boundary_ratio <= 1e-8, rep.boundary_ratio, 1e-8);
  return rep;
}

namespace {

std::vector<SweepPoint> sweep(const ModelParams& base, const Grid& grid, const SolverConfig& cfg,
                              const std::vector<double>& values, int jobs, bool over_mu) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0))
      throw RangeError("sweep values must be positive");
    if (i > 0 && !(values[i] > values[i - 1]))
      throw RangeError("sweep values must be strictly ascending");
  }
  require_solvable(base);
  const RieszOperator op = build_riesz(grid, base.alpha);
  std::vector<SweepPoint> out(values.size());
  auto params_for = [&](std::size_t i) {
    ModelParams prm = base;
    (over_mu ? prm.mu : prm.nu) = values[i];
    return prm;
  };
  auto store = [&](std::size_t i, const ModelParams& prm, GroundStateResult r) {
    SweepPoint& pt = out[i];
    pt.mu = prm.mu;
    pt.nu = prm.nu;
    pt.m = r.m;
    pt.converged = r.converged;
    pt.stationary = r.stationary;
    pt.iterations = r.iterations;
    pt.result = std::move(r);
  };

  if (jobs <= 1) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      const ModelParams prm = params_for(i);
      const FieldPair* start = i > 0 ? &out[i - 1].result.pair : nullptr;
      store(i, prm, minimize_ground_state(prm, op, cfg, start));
    }
    return out;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(values.size());
  auto worker = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      try {
        const ModelParams prm = params_for(i);
        store(i, prm, minimize_ground_state(prm, op, cfg));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int nthreads = std::min<int>(jobs, static_cast<int>(values.size()));
  for (int k = 0; k < nthreads; ++k)
    pool.emplace_back(worker);
  for (auto& th : pool)
    th.join();
  for (auto& e : errors)
    if (e)
      std::rethrow_exception(e);
  return out;
}

} // namespace

std::vector<SweepPoint> sweep_mu(const ModelParams& params, const Grid& grid,
                                 const SolverConfig& config, const std::vector<double>& mu_values,
                                 int jobs) {
  return sweep(params, grid, config, mu_values, jobs, true);
}

std::vector<SweepPoint> sweep_nu(const ModelParams& params, const Grid& grid,
                                 const SolverConfig& config, const std::vector<double>& nu_values,
                                 int jobs) {
  return sweep(params, grid, config, nu_values, jobs, false);
}

NonexistenceProbe nonexistence_probe(const ModelParams& prm, const Breakdown& bd) {
  const ExponentRegime regime = validate_params(prm);
  if (regime != ExponentRegime::DoublyCriticalUpper &&
      regime != ExponentRegime::DoublyCriticalLower)
    throw RegimeError("nonexistence probe needs p = q at a critical exponent");
  const double N = nehari(prm, bd), P = pohozaev(prm, bd);
  NonexistenceProbe out;
  out.Q1 = P - 0.5 * N;
  out.Q2 = 1.5 * N - P;
  out.bound1 = (1.0 - prm.delta()) * bd.B();
  out.bound2 = 0.0;
  return out;
}

NonexistenceProbe nonexistence_probe(const ModelParams& prm, const RieszOperator& op,
                                     const FieldPair& pair) {
  return nonexistence_probe(prm, breakdown(prm, op, pair));
}

nlohmann::json config_to_json(const SolverConfig& c) {
  return {{"max_iters", c.max_iters},   {"grad_tol", c.grad_tol},
          {"nehari_tol", c.nehari_tol}, {"step0", c.step0},
          {"armijo_c", c.armijo_c},     {"armijo_shrink", c.armijo_shrink},
          {"positivity", c.positivity}, {"symmetrize_every", c.symmetrize_every},
          {"seed", c.seed}};
}

SolverConfig config_from_json(const nlohmann::json& j, SolverConfig c) {
  if (!j.is_object())
    throw ConfigError("solver config must be a JSON object");
  try {
    c.max_iters = j.value("max_iters", c.max_iters);
    c.grad_tol = j.value("grad_tol", c.grad_tol);
    c.nehari_tol = j.value("nehari_tol", c.nehari_tol);
    c.step0 = j.value("step0", c.step0);
    c.armijo_c = j.value("armijo_c", c.armijo_c);
    c.armijo_shrink = j.value("armijo_shrink", c.armijo_shrink);
    c.positivity = j.value("positivity", c.positivity);
    c.symmetrize_every = j.value("symmetrize_every", c.symmetrize_every);
    c.seed = j.value("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("solver config: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::json residuals_to_json(const Residuals& r) {
  return {{"nehari", r.nehari},
          {"pohozaev", r.pohozaev},
          {"np", r.np},
          {"strong", r.strong},
          {"tangential", r.tangential},
          {"multiplier", r.multiplier},
          {"scale", r.scale},
          {"strong_scale", r.strong_scale},
          {"lower_bound_slack", r.lower_bound_slack}};
}

nlohmann::json report_to_json(const VerificationReport& rep) {
  nlohmann::json checks = nlohmann::json::array();
  for (const Check& c : rep.checks)
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"bound", c.bound}});
  return {{"all_passed", rep.all_passed()},
          {"m", rep.m},
          {"t_star", rep.t_star},
          {"boundary_ratio", rep.boundary_ratio},
          {"residuals", residuals_to_json(rep.residuals)},
          {"checks", checks}};
}

} // namespace kc
