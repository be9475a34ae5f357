#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <nlohmann/json.hpp>

#include "kc/core.hpp"
#include "kc/error.hpp"

using namespace kc;

TEST_SUITE("core") {

TEST_CASE("regime of the noncritical example") {
  ModelParams prm;
  CHECK(validate_params(prm) == ExponentRegime::Noncritical);
  CHECK(solvable(ExponentRegime::Noncritical));
}

TEST_CASE("upper critical token resolves to 3 + alpha") {
  ModelParams prm;
  prm.q_spec = ExponentSpec::upper_critical();
  CHECK(validate_params(prm) == ExponentRegime::UpperHalfCritical);
  CHECK(prm.q() == 4.0);
}

TEST_CASE("all five regimes") {
  ModelParams prm;
  prm.p_spec = ExponentSpec::lower_critical();
  CHECK(validate_params(prm) == ExponentRegime::LowerHalfCritical);
  prm.q_spec = ExponentSpec::lower_critical();
  CHECK(validate_params(prm) == ExponentRegime::DoublyCriticalLower);
  prm.p_spec = prm.q_spec = ExponentSpec::upper_critical();
  CHECK(validate_params(prm) == ExponentRegime::DoublyCriticalUpper);
  CHECK_FALSE(solvable(ExponentRegime::DoublyCriticalUpper));
  CHECK_FALSE(solvable(ExponentRegime::DoublyCriticalLower));
}

TEST_CASE("nearby literals stay noncritical") {
  ModelParams prm;
  prm.q_spec = ExponentSpec::value(4.0 - 1e-12);
  CHECK(validate_params(prm) == ExponentRegime::Noncritical);
  prm.p_spec = ExponentSpec::value(4.0 / 3.0 + 1e-12);
  prm.q_spec = ExponentSpec::value(2.0);
  CHECK(validate_params(prm) == ExponentRegime::Noncritical);
}

TEST_CASE("coupling at sqrt(V1 V2) is rejected") {
  ModelParams prm;
  prm.lambda = 1.0;
  CHECK_THROWS_AS(validate_params(prm), CouplingError);
  prm.lambda = 0.999;
  CHECK_NOTHROW(validate_params(prm));
}

TEST_CASE("range errors") {
  ModelParams prm;
  prm.alpha = 3.0;
  CHECK_THROWS_AS(validate_params(prm), RangeError);
  prm = ModelParams{};
  prm.p_spec = ExponentSpec::value(3.0);
  prm.q_spec = ExponentSpec::value(2.0);
  CHECK_THROWS_AS(validate_params(prm), RangeError);
  prm = ModelParams{};
  prm.b2 = 0.0;
  CHECK_THROWS_AS(validate_params(prm), RangeError);
  prm = ModelParams{};
  prm.q_spec = ExponentSpec::value(4.5);
  CHECK_THROWS_AS(validate_params(prm), RangeError);
  prm = ModelParams{};
  prm.mu = NAN;
  CHECK_THROWS_AS(validate_params(prm), RangeError);
}

TEST_CASE("Newtonian normalization") {
  CHECK(riesz_normalization(2.0) == doctest::Approx(1.0 / (4.0 * std::numbers::pi)).epsilon(1e-15));
}

TEST_CASE("normalization against multiprecision gamma") {
  using mp = boost::multiprecision::cpp_bin_float_50;
  for (double alpha : {0.25, 1.0, 1.5, 2.5}) {
    const mp a = alpha;
    const mp pi = boost::math::constants::pi<mp>();
    const mp expect = boost::math::tgamma((3 - a) / 2) /
                      (boost::math::tgamma(a / 2) * pow(pi, mp(1.5)) * pow(mp(2), a));
    CHECK(riesz_normalization(alpha) == doctest::Approx(static_cast<double>(expect)).epsilon(1e-14));
  }
  // frozen: 1 / (2 pi^2)
  CHECK(riesz_normalization(1.0) == doctest::Approx(0.050660591821168885).epsilon(1e-15));
}

TEST_CASE("normalization is positive inside (0, 3) and rejects the endpoints") {
  for (int i = 1; i < 300; ++i)
    CHECK(riesz_normalization(0.01 * i) > 0.0);
  CHECK_THROWS_AS(riesz_normalization(0.0), RangeError);
  CHECK_THROWS_AS(riesz_normalization(3.0), RangeError);
}

TEST_CASE("params json round trip") {
  ModelParams prm;
  prm.mu = 3.5;
  prm.q_spec = ExponentSpec::upper_critical();
  const ModelParams back = params_from_json(params_to_json(prm));
  CHECK(back.mu == 3.5);
  CHECK(back.q_spec.kind == ExponentKind::UpperCritical);
  CHECK_THROWS_AS(params_from_json(nlohmann::json{{"p", "critical"}}), ConfigError);
  CHECK_THROWS_AS(params_from_json(nlohmann::json{{"mu", "one"}}), ConfigError);
}

}
