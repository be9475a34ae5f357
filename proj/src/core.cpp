#include "kc/core.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "kc/error.hpp"

namespace kc {

double ExponentSpec::resolve(double alpha) const {
  switch (kind) {
  case ExponentKind::LowerCritical:
    return (3.0 + alpha) / 3.0;
  case ExponentKind::UpperCritical:
    return 3.0 + alpha;
  case ExponentKind::Literal:
    break;
  }
  return literal;
}

double ModelParams::delta() const { return lambda / std::sqrt(V1 * V2); }

std::string_view to_string(ExponentRegime r) {
  switch (r) {
  case ExponentRegime::Noncritical:
    return "Noncritical";
  case ExponentRegime::UpperHalfCritical:
    return "UpperHalfCritical";
  case ExponentRegime::LowerHalfCritical:
    return "LowerHalfCritical";
  case ExponentRegime::DoublyCriticalUpper:
    return "DoublyCriticalUpper";
  case ExponentRegime::DoublyCriticalLower:
    return "DoublyCriticalLower";
  }
  return "?";
}

bool solvable(ExponentRegime r) {
  return r == ExponentRegime::Noncritical || r == ExponentRegime::UpperHalfCritical ||
         r == ExponentRegime::LowerHalfCritical;
}

namespace {

void require_positive(double x, const char* name) {
  if (!std::isfinite(x) || !(x > 0.0)) {
    std::ostringstream os;
    os << name << " must be a positive finite number, got " << x;
    throw RangeError(os.str());
  }
}

} // namespace

ExponentRegime validate_params(const ModelParams& prm) {
  require_positive(prm.a1, "a1");
  require_positive(prm.a2, "a2");
  require_positive(prm.b1, "b1");
  require_positive(prm.b2, "b2");
  require_positive(prm.V1, "V1");
  require_positive(prm.V2, "V2");
  require_positive(prm.lambda, "lambda");
  require_positive(prm.mu, "mu");
  require_positive(prm.nu, "nu");
  if (!std::isfinite(prm.alpha) || !(prm.alpha > 0.0 && prm.alpha < 3.0))
    throw RangeError("alpha must lie in (0, 3), got " + std::to_string(prm.alpha));

  const double p = prm.p(), q = prm.q();
  const double lo = prm.lower_critical(), hi = prm.upper_critical();
  if (!std::isfinite(p) || !std::isfinite(q))
    throw RangeError("exponents must be finite");
  if (!(lo <= p && p <= q && q <= hi)) {
    std::ostringstream os;
    os << "exponents must satisfy (3+alpha)/3 <= p <= q <= 3+alpha; got p=" << p << " q=" << q
       << " with bounds [" << lo << ", " << hi << "]";
    throw RangeError(os.str());
  }
  if (!(prm.delta() < 1.0)) {
    std::ostringstream os;
    os << "assumption (V) fails: lambda=" << prm.lambda << " >= sqrt(V1*V2)="
       << std::sqrt(prm.V1 * prm.V2) << " (needs lambda <= delta*sqrt(V1*V2) with delta < 1)";
    throw CouplingError(os.str());
  }

  // Critical membership is an exact match: a token, or a literal that equals
  // the bound bit for bit. Nearby literals stay noncritical.
  const bool p_low = prm.p_spec.kind == ExponentKind::LowerCritical || p == lo;
  const bool p_up = prm.p_spec.kind == ExponentKind::UpperCritical || p == hi;
  const bool q_low = prm.q_spec.kind == ExponentKind::LowerCritical || q == lo;
  const bool q_up = prm.q_spec.kind == ExponentKind::UpperCritical || q == hi;

  // p <= q makes p = 3+alpha imply q = 3+alpha, and q = (3+alpha)/3 imply p
  // = (3+alpha)/3.
  if (p_up)
    return ExponentRegime::DoublyCriticalUpper;
  if (q_low)
    return ExponentRegime::DoublyCriticalLower;
  if (q_up)
    return ExponentRegime::UpperHalfCritical;
  if (p_low)
    return ExponentRegime::LowerHalfCritical;
  return ExponentRegime::Noncritical;
}

double riesz_normalization(double alpha) {
  if (!std::isfinite(alpha) || !(alpha > 0.0 && alpha < 3.0))
    throw RangeError("riesz_normalization: alpha must lie in (0, 3)");
  const double pi = std::numbers::pi;
  return std::tgamma(0.5 * (3.0 - alpha)) /
         (std::tgamma(0.5 * alpha) * std::pow(pi, 1.5) * std::pow(2.0, alpha));
}

namespace {

ExponentSpec exponent_from_json(const nlohmann::json& j, const char* key) {
  if (j.is_number())
    return ExponentSpec::value(j.get<double>());
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "lower-critical")
      return ExponentSpec::lower_critical();
    if (s == "upper-critical")
      return ExponentSpec::upper_critical();
    throw ConfigError(std::string(key) + ": unknown exponent token '" + s + "'");
  }
  throw ConfigError(std::string(key) + ": expected a number or an exponent token");
}

nlohmann::json exponent_to_json(const ExponentSpec& e) {
  switch (e.kind) {
  case ExponentKind::LowerCritical:
    return "lower-critical";
  case ExponentKind::UpperCritical:
    return "upper-critical";
  case ExponentKind::Literal:
    break;
  }
  return e.literal;
}

} // namespace

ModelParams params_from_json(const nlohmann::json& j) {
  if (!j.is_object())
    throw ConfigError("parameter block must be a JSON object");
  ModelParams prm;
  auto num = [&](const char* key, double& dst) {
    if (!j.contains(key))
      return;
    if (!j.at(key).is_number())
      throw ConfigError(std::string(key) + ": expected a number");
    dst = j.at(key).get<double>();
  };
  num("a1", prm.a1);
  num("a2", prm.a2);
  num("b1", prm.b1);
  num("b2", prm.b2);
  num("V1", prm.V1);
  num("V2", prm.V2);
  num("lambda", prm.lambda);
  num("mu", prm.mu);
  num("nu", prm.nu);
  num("alpha", prm.alpha);
  if (j.contains("p"))
    prm.p_spec = exponent_from_json(j.at("p"), "p");
  if (j.contains("q"))
    prm.q_spec = exponent_from_json(j.at("q"), "q");
  return prm;
}

nlohmann::json params_to_json(const ModelParams& prm) {
  return {{"a1", prm.a1},         {"a2", prm.a2}, {"b1", prm.b1},   {"b2", prm.b2},
          {"V1", prm.V1},         {"V2", prm.V2}, {"lambda", prm.lambda},
          {"mu", prm.mu},         {"nu", prm.nu}, {"p", exponent_to_json(prm.p_spec)},
          {"q", exponent_to_json(prm.q_spec)},    {"alpha", prm.alpha}};
}

} // namespace kc
