#pragma once

#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "kc/core.hpp"
#include "kc/riesz.hpp"
#include "kc/spectral.hpp"

namespace kc {

/// Closed-form Sobolev constant in three dimensions, 3 (pi/2)^{4/3}.
double talenti_constant();

// Scale- and amplitude-invariant Rayleigh quotients.

/// |grad w|_2^2 / |w|_6^2
double sobolev_quotient(const Field& w);
/// |grad w|_2^2 / D_{3+alpha}(w)^{1/(3+alpha)}
double upper_critical_quotient(const RieszOperator& op, const Field& w);
/// |w|_2^2 / D_{(3+alpha)/3}(w)^{3/(3+alpha)}
double lower_critical_quotient(const RieszOperator& op, const Field& w);

struct BestConstantEstimate {
  double value = 0;        ///< refined minimum on the finest grid
  double trial_value = 0;  ///< quotient of the trial profile on the finest grid
  std::string trial_profile;
  std::vector<std::pair<int, double>> refinement_trend;  ///< (n, refined minimum)
  /// Richardson limit of the last three trend values with the observed
  /// contraction ratio; NaN with fewer than three levels or a non-monotone trend.
  double extrapolated = 0;
};

/// The extrapolation used for BestConstantEstimate::extrapolated.
double richardson_limit(const std::vector<std::pair<int, double>>& trend);

struct EstimateOptions {
  int max_iters = 300;
  /// Stop when the relative decrease over one step drops below this.
  double tol = 1e-10;
  /// Grids n / 2^(levels-1), ..., n at fixed L (coarsest kept >= 16).
  int levels = 3;
  /// Descent is confined to |x|_inf < mask_fraction L; a smooth taper
  /// follows up to 0.95 L.
  double mask_fraction = 0.75;
};

BestConstantEstimate estimate_sobolev(const Grid& grid, const EstimateOptions& opts = {});
/// RangeError on alpha.
BestConstantEstimate estimate_S_star(const Grid& grid, double alpha,
                                     const EstimateOptions& opts = {});
BestConstantEstimate estimate_S_lower(const Grid& grid, double alpha,
                                      const EstimateOptions& opts = {});

/// (alpha+1)/(4(3+alpha)) nu (a2 S* / nu)^{(3+alpha)/(2+alpha)}. RegimeError
/// unless q is upper critical and p is not.
double threshold_upper(const ModelParams& params, double S_star);

/// alpha/(2(3+alpha)) mu (4(3+alpha) V1 (1-delta) S_* / (mu (12+alpha)))^e for
/// the two exponents that appear for the lower half critical threshold.
struct LowerThreshold {
  double with_exponent_3 = 0;      ///< e = (3+alpha)/3
  double with_exponent_alpha = 0;  ///< e = (3+alpha)/alpha
};
/// RegimeError unless p is lower critical and q is not.
LowerThreshold threshold_lower(const ModelParams& params, double S_lower);

nlohmann::json estimate_to_json(const BestConstantEstimate& e);

} // namespace kc
