#include "kc/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "kc/error.hpp"
#include "kc/reduce.hpp"

namespace kc {

namespace {

std::string fmt_g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

// Cubic Lagrange weights on nodes -1, 0, 1, 2 at offset s in [0, 1).
void cubic_weights(double s, double w[4]) {
  w[0] = -s * (s - 1.0) * (s - 2.0) / 6.0;
  w[1] = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
  w[2] = -(s + 1.0) * s * (s - 2.0) / 2.0;
  w[3] = (s + 1.0) * s * (s - 1.0) / 6.0;
}

} // namespace

double interpolate(const Field& f, double x, double y, double z) {
  const Grid& g = f.grid();
  const int n = g.n;
  const double h = g.h();
  const double xi[3] = {(x + g.L) / h, (y + g.L) / h, (z + g.L) / h};
  int base[3];
  double w[3][4];
  for (int a = 0; a < 3; ++a) {
    if (!(xi[a] > -2.0 && xi[a] < n + 1.0))
      return 0.0;
    const double fl = std::floor(xi[a]);
    base[a] = static_cast<int>(fl) - 1;
    cubic_weights(xi[a] - fl, w[a]);
  }
  double sum = 0.0;
  for (int i = 0; i < 4; ++i) {
    const int ii = base[0] + i;
    if (ii < 0 || ii >= n || w[0][i] == 0.0)
      continue;
    for (int j = 0; j < 4; ++j) {
      const int jj = base[1] + j;
      if (jj < 0 || jj >= n || w[1][j] == 0.0)
        continue;
      double row = 0.0;
      for (int k = 0; k < 4; ++k) {
        const int kk = base[2] + k;
        if (kk < 0 || kk >= n)
          continue;
        row += w[2][k] * f.at(ii, jj, kk);
      }
      sum += w[0][i] * w[1][j] * row;
    }
  }
  return sum;
}

double mass_outside(const Field& f, double r) {
  const Grid& g = f.grid();
  const int n = g.n;
  const auto vals = f.values();
  const double total = deterministic_sum(vals.size(), [&](std::size_t i) { return vals[i] * vals[i]; });
  if (!(total > 0.0))
    return 0.0;
  const double outside = deterministic_sum(vals.size(), [&](std::size_t idx) {
    const int k = static_cast<int>(idx % n);
    const int j = static_cast<int>((idx / n) % n);
    const int i = static_cast<int>(idx / (static_cast<std::size_t>(n) * n));
    const double m = std::max({std::abs(g.x(i)), std::abs(g.x(j)), std::abs(g.x(k))});
    return m > r ? vals[idx] * vals[idx] : 0.0;
  });
  return outside / total;
}

Field scale_field(const Field& f, double t) {
  if (!(t > 0.0) || !std::isfinite(t))
    throw RangeError("scale_field: t must be positive");
  if (t == 1.0)
    return f;
  const Grid& g = f.grid();
  const double r = g.L * std::min(1.0, 1.0 / (t * t));
  const double frac = mass_outside(f, r);
  if (frac > 1e-8)
    throw SupportError("scale_field: field mass outside the dilation window is " +
                       fmt_g(frac));
  const double inv = 1.0 / (t * t);
  return Field::from_function(g, [&](double x, double y, double z) {
    return t * interpolate(f, x * inv, y * inv, z * inv);
  });
}

} // namespace kc
