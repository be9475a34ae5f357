#pragma once

#include "kc/spectral.hpp"

namespace kc {

/// Field-level dilation g(x) = t f(x / t^2) by tricubic interpolation, with f
/// taken as zero outside the box. Only used to cross-check scale_breakdown.
///
/// For t > 1 the sample points x / t^2 cover only |y|_inf <= L / t^2, so the
/// squared mass of f outside L min(1, 1/t^2) must be below 1e-8 of the total
/// (SupportError otherwise). RangeError for t <= 0.
Field scale_field(const Field& f, double t);

/// Fraction of the squared L2 mass of f outside the cube |x|_inf <= r.
double mass_outside(const Field& f, double r);

/// Tricubic (Lagrange) interpolant of f at a point, zero beyond the samples.
double interpolate(const Field& f, double x, double y, double z);

} // namespace kc
