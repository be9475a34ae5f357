#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "kc/core.hpp"
#include "kc/fiber.hpp"
#include "kc/functionals.hpp"
#include "kc/riesz.hpp"
#include "kc/spectral.hpp"

namespace kc {

struct SolverConfig {
  int max_iters = 2000;
  /// Strong residual bound, relative to strong_scale (see Residuals).
  double grad_tol = 1e-6;
  /// |J| bound, relative to A1 + A2 + B1 + B2.
  double nehari_tol = 1e-8;
  double step0 = 1.0;
  double armijo_c = 1e-4;
  double armijo_shrink = 0.5;
  /// Replace (u, v) by (|u|, |v|) every symmetrize_every iterations.
  bool positivity = true;
  int symmetrize_every = 10;
  std::uint64_t seed = 1;

  /// Throws ConfigError.
  void validate() const;
};

struct Residuals {
  double nehari = 0;    ///< |<I'(u,v), (u,v)>|
  double pohozaev = 0;  ///< |P|
  double np = 0;        ///< |J|
  double strong = 0;    ///< L2 norm of first_variation
  /// L2 norm of first_variation minus its component along grad J: the
  /// stationarity residual of I restricted to J = 0.
  double tangential = 0;
  /// Lagrange multiplier of the constraint J = 0 (preconditioned fit).
  double multiplier = 0;
  double scale = 0;         ///< A1 + A2 + B1 + B2
  double strong_scale = 0;  ///< scale / |(u,v)|_2, the natural size of a residual field
  /// m minus the level lower bound; nonnegative on the manifold.
  double lower_bound_slack = 0;
};

struct IterationRecord {
  int iter = 0;
  double M = 0;
  double J_res = 0;       ///< |J| / scale
  double strong_res = 0;  ///< strong / strong_scale
  double t_star = 0;
  double step = 0;
};

struct GroundStateResult {
  FieldPair pair;
  double t_star = 1.0;
  double m = 0.0;
  Breakdown breakdown;
  Residuals residuals;
  int iterations = 0;
  bool converged = false;
  /// The constrained descent stopped at a stationary point of I on J = 0,
  /// whether or not the strong residual met its tolerance.
  bool stationary = false;
  std::string stop_reason;
  std::vector<IterationRecord> history;
};

struct ReducedEval {
  double M = 0;
  FieldPair grad;
  double t_star = 1;
};

/// M(u,v) = max_t I(u^t, v^t) and its envelope gradient (t* held fixed).
ReducedEval reduced_value_and_gradient(const ModelParams& params, const RieszOperator& op,
                                       const FieldPair& pair);
double reduced_value(const ModelParams& params, const RieszOperator& op, const FieldPair& pair);

/// Breakdown of (c u, c v).
Breakdown scale_amplitude(const Breakdown& bd, double c, const ModelParams& params);
/// The amplitude c > 0 nearest 1 with J(c u, c v) = 0; NaN if none is found.
double manifold_amplitude(const Breakdown& bd, const ModelParams& params);

/// Off-centre Gaussians of width L/8 at distance L/16 from the origin, the
/// offset direction drawn from config.seed, dilated analytically until t* is
/// near 1 and then put on J = 0 by an amplitude factor.
FieldPair initial_pair(const ModelParams& params, const RieszOperator& op,
                       const SolverConfig& config);

/// Throws RegimeError for the doubly critical regimes.
GroundStateResult minimize_ground_state(const ModelParams& params, const Grid& grid,
                                        const SolverConfig& config);
/// Same, reusing op. A start pair is put on the manifold first.
GroundStateResult minimize_ground_state(const ModelParams& params, const RieszOperator& op,
                                        const SolverConfig& config,
                                        const FieldPair* start = nullptr);

/// Recomputes residuals, t*, m and the slack for a pair.
Residuals compute_residuals(const ModelParams& params, const RieszOperator& op,
                            const FieldPair& pair, double* m_out = nullptr,
                            double* t_star_out = nullptr);

struct Check {
  std::string name;
  bool passed = false;
  double value = 0;
  double bound = 0;
};

struct VerificationReport {
  std::vector<Check> checks;
  Residuals residuals;
  double m = 0;
  double t_star = 1;
  double boundary_ratio = 0;
  bool all_passed() const;
  const Check* find(const std::string& name) const;
};

/// Largest |w| on the outer faces of the box relative to max |w|, over both components.
double boundary_ratio(const FieldPair& pair);

VerificationReport verify_solution(const ModelParams& params, const RieszOperator& op,
                                   const GroundStateResult& result, const SolverConfig& config);

struct SweepPoint {
  double mu = 0, nu = 0, m = 0;
  bool converged = false;
  bool stationary = false;
  int iterations = 0;
  GroundStateResult result;
};

/// Ascending mu values (RangeError otherwise). jobs == 1 warm-starts each
/// solve from the previous one; jobs > 1 runs cold starts concurrently.
std::vector<SweepPoint> sweep_mu(const ModelParams& params, const Grid& grid,
                                 const SolverConfig& config, const std::vector<double>& mu_values,
                                 int jobs = 1);
std::vector<SweepPoint> sweep_nu(const ModelParams& params, const Grid& grid,
                                 const SolverConfig& config, const std::vector<double>& nu_values,
                                 int jobs = 1);

struct NonexistenceProbe {
  double Q1 = 0, Q2 = 0;
  double bound1 = 0, bound2 = 0;
};

/// Q1 = P - N/2 against (1-delta)(B1+B2) and Q2 = 3N/2 - P against 0, with
/// N = <I'(u,v), (u,v)>. Throws RegimeError outside the doubly critical regimes.
NonexistenceProbe nonexistence_probe(const ModelParams& params, const Breakdown& bd);
NonexistenceProbe nonexistence_probe(const ModelParams& params, const RieszOperator& op,
                                     const FieldPair& pair);

nlohmann::json config_to_json(const SolverConfig& config);
SolverConfig config_from_json(const nlohmann::json& j, SolverConfig base = {});
nlohmann::json residuals_to_json(const Residuals& r);
nlohmann::json report_to_json(const VerificationReport& report);

} // namespace kc
