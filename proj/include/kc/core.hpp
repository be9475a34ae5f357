#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

namespace kc {

/// How a Choquard exponent was declared. Critical values are only ever
/// reached through the symbolic tokens; a numeric literal that happens to be
/// close to a critical value stays noncritical.
enum class ExponentKind { Literal, LowerCritical, UpperCritical };

struct ExponentSpec {
  ExponentKind kind = ExponentKind::Literal;
  double literal = 0.0;

  static ExponentSpec value(double x) { return {ExponentKind::Literal, x}; }
  static ExponentSpec lower_critical() { return {ExponentKind::LowerCritical, 0.0}; }
  static ExponentSpec upper_critical() { return {ExponentKind::UpperCritical, 0.0}; }

  /// Resolves to a number; (3+alpha)/3 and 3+alpha for the tokens.
  double resolve(double alpha) const;
};

/// Coefficients of the coupled Kirchhoff-Choquard system
///   -(a1 + b1 |grad u|^2) Lap u + V1 u = mu (I_alpha * |u|^p) |u|^{p-2} u + lambda v
///   -(a2 + b2 |grad v|^2) Lap v + V2 v = nu (I_alpha * |v|^q) |v|^{q-2} v + lambda u
struct ModelParams {
  double a1 = 1.0, a2 = 1.0;
  double b1 = 1.0, b2 = 1.0;
  double V1 = 1.0, V2 = 1.0;
  double lambda = 0.5;
  double mu = 1.0, nu = 1.0;
  ExponentSpec p_spec = ExponentSpec::value(2.0);
  ExponentSpec q_spec = ExponentSpec::value(2.0);
  double alpha = 1.0;

  double p() const { return p_spec.resolve(alpha); }
  double q() const { return q_spec.resolve(alpha); }
  /// lambda / sqrt(V1 V2); the coupling assumption reads delta < 1.
  double delta() const;
  double lower_critical() const { return (3.0 + alpha) / 3.0; }
  double upper_critical() const { return 3.0 + alpha; }
};

enum class ExponentRegime {
  Noncritical,
  UpperHalfCritical,
  LowerHalfCritical,
  DoublyCriticalUpper,
  DoublyCriticalLower,
};

std::string_view to_string(ExponentRegime r);

/// Classifies the exponent pair. Throws RangeError on inadmissible ranges or
/// nonpositive coefficients and CouplingError when lambda >= sqrt(V1 V2).
ExponentRegime validate_params(const ModelParams& params);

/// True for the regimes in which a ground state is sought.
bool solvable(ExponentRegime r);

/// Normalization of the Riesz kernel A_alpha |x|^{alpha-3} in three dimensions.
double riesz_normalization(double alpha);

ModelParams params_from_json(const nlohmann::json& j);
nlohmann::json params_to_json(const ModelParams& params);

} // namespace kc
