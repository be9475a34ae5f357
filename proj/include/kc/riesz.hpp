#pragma once

#include <cstddef>
#include <vector>

#include "kc/spectral.hpp"

namespace kc {

/// Weight given to the singular origin cell.
enum class OriginRule {
  /// Kernel average over a ball of one cell volume,
  /// A_alpha 4 pi rho^alpha / (alpha h^3) with rho = (3/(4 pi))^{1/3} h.
  /// Leaves an O(h^alpha) quadrature error.
  BallAverage,
  /// -A_alpha Z(3 - alpha) h^{alpha-3}, Z the Epstein zeta function of Z^3.
  /// Cancels the leading error term of the punctured lattice sum, leaving
  /// O(h^{alpha+2}) for smooth fields.
  LatticeZeta,
};

/// Analytic continuation of sum_{k in Z^3, k != 0} |k|^{-s}, for 0 < s < 3.
double lattice_zeta(double s);

/// Sampled Riesz kernel A_alpha |d h|^{alpha-3} at lattice offset d; the
/// origin weight follows rule.
double riesz_kernel_sample(const Grid& grid, double alpha, double a_alpha, int dx, int dy, int dz,
                           OriginRule rule = OriginRule::BallAverage);

/// Free-space convolution with the sampled Riesz kernel, computed on the
/// zero-padded (2n)^3 box so no periodic images enter.
class RieszOperator {
public:
  RieszOperator() = default;

  const Grid& grid() const { return grid_; }
  double alpha() const { return alpha_; }
  double a_alpha() const { return a_alpha_; }
  OriginRule origin_rule() const { return rule_; }
  int padded_n() const { return 2 * grid_.n; }
  /// Real part of the transformed kernel on the padded half spectrum.
  const std::vector<double>& kernel_hat() const { return kernel_hat_; }
  /// Largest |Im| of the transformed kernel relative to its largest |Re|.
  double kernel_imag_residue() const { return imag_residue_; }

private:
  friend RieszOperator build_riesz(const Grid& grid, double alpha, OriginRule rule);
  Grid grid_{};
  OriginRule rule_ = OriginRule::BallAverage;
  double alpha_ = 0.0;
  double a_alpha_ = 0.0;
  std::vector<double> kernel_hat_;
  double imag_residue_ = 0.0;
};

/// Bytes needed by build_riesz plus one riesz_apply on this grid.
std::size_t riesz_memory_estimate(const Grid& grid);
/// Cap enforced by build_riesz (AllocationError above it). Default 4 GiB.
void set_riesz_memory_cap(std::size_t bytes);
std::size_t riesz_memory_cap();

RieszOperator build_riesz(const Grid& grid, double alpha,
                          OriginRule rule = OriginRule::BallAverage);

/// h^3 sum_y K(x - y) f(y).
Field riesz_apply(const RieszOperator& op, const Field& f);

/// integral of (I_alpha * |f|^s) |f|^s.
double nonlocal_term(const RieszOperator& op, const Field& f, double s);

/// The nonlocal integral together with the potential I_alpha * |f|^s, which
/// the first variation reuses.
struct NonlocalEval {
  double value = 0.0;
  Field potential;
};
NonlocalEval nonlocal_eval(const RieszOperator& op, const Field& f, double s);

} // namespace kc
