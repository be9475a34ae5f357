#pragma once

// Slow reference paths. Everything here is single-threaded and shares no
// arithmetic with the code it is compared against.

#include <cstddef>
#include <cstdint>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "kc/core.hpp"
#include "kc/fiber.hpp"
#include "kc/minimizer.hpp"
#include "kc/riesz.hpp"
#include "kc/spectral.hpp"

namespace kc {

/// h^3 sum_y K(x - y) f(y) by a double loop over the same kernel samples
/// that build_riesz transforms. SizeError for n > 16.
Field riesz_direct(const Grid& grid, double alpha, const Field& f);

struct FiberScanRow {
  double t = 0, zeta = 0, dzeta = 0;
};

struct FiberScan {
  std::vector<FiberScanRow> table;
  std::size_t argmax_index = 0;
  double argmax = 0;
  /// Sign changes of zeta' along the table.
  int sign_changes = 0;
};

/// count log-spaced points on [t_min, t_max]. RangeError unless
/// 0 < t_min < t_max and count >= 2.
FiberScan fiber_scan(const FiberPolynomial& poly, double t_min, double t_max, std::size_t count);

enum class FdTarget { Energy, Reduced };

/// (F(w + eps d) - F(w - eps d)) / (2 eps) for F = I or the reduced M.
double fd_directional(const ModelParams& params, const RieszOperator& op, const FieldPair& pair,
                      const FieldPair& direction, double eps, FdTarget target = FdTarget::Energy);

struct ScalarFunctionals {
  double I = 0, J = 0, P = 0, N = 0;
};

/// I, J, P and N = <I'(u,v), (u,v)> from pointwise loops: the gradient term
/// from the three spectral derivatives, the nonlocal term from riesz_apply and
/// every integral by compensated summation.
ScalarFunctionals functionals_direct(const ModelParams& params, const RieszOperator& op,
                                     const FieldPair& pair);

/// Sum of a few Gaussian bumps of width L/10 to L/7 centred within L/6 of
/// the origin; seeded.
Field random_smooth_field(const Grid& grid, std::uint64_t seed, int bumps = 3);

/// The certification run behind `oracle-test`: each fast path against its
/// oracle on small grids.
std::vector<Check> run_oracle_certification(std::uint64_t seed);
nlohmann::json checks_to_json(const std::vector<Check>& checks);

} // namespace kc
