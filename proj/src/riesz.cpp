#include "kc/riesz.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "fft.hpp"
#include "kc/core.hpp"
#include "kc/error.hpp"

namespace kc {

using detail::cplx;

namespace {

std::atomic<std::size_t> g_memory_cap{std::size_t{4} << 30};

// Signed lattice offset stored at position i of a 2n-point padded axis.
int padded_offset(int i, int n) { return i < n ? i : i - 2 * n; }

} // namespace

double lattice_zeta(double s) {
  if (!(s > 0.0 && s < 3.0))
    throw RangeError("lattice_zeta: need 0 < s < 3");
  // Theta-function splitting at x = 1: both tails decay like exp(-pi |k|^2).
  const double a = s / 2, b = (3.0 - s) / 2;
  double tail = 0.0;
  const int R = 6;
  for (int i = -R; i <= R; ++i)
    for (int j = -R; j <= R; ++j)
      for (int k = -R; k <= R; ++k) {
        const int r2 = i * i + j * j + k * k;
        if (r2 == 0 || r2 > R * R)
          continue;
        const double x = std::numbers::pi * r2;
        tail += boost::math::tgamma(a, x) * std::pow(x, -a) + boost::math::tgamma(b, x) * std::pow(x, -b);
      }
  return std::pow(std::numbers::pi, a) / std::tgamma(a) * (tail + 2.0 / (s - 3.0) - 2.0 / s);
}

double riesz_kernel_sample(const Grid& grid, double alpha, double a_alpha, int dx, int dy, int dz,
                           OriginRule rule) {
  const double h = grid.h();
  if (dx == 0 && dy == 0 && dz == 0) {
    if (rule == OriginRule::LatticeZeta)
      return -a_alpha * lattice_zeta(3.0 - alpha) * std::pow(h, alpha - 3.0);
    const double rho = std::cbrt(3.0 / (4.0 * std::numbers::pi)) * h;
    return a_alpha * 4.0 * std::numbers::pi * std::pow(rho, alpha) / (alpha * h * h * h);
  }
  const double r = h * std::sqrt(static_cast<double>(dx) * dx + static_cast<double>(dy) * dy +
                                 static_cast<double>(dz) * dz);
  return a_alpha * std::pow(r, alpha - 3.0);
}

std::size_t riesz_memory_estimate(const Grid& grid) {
  const std::size_t m = 2 * static_cast<std::size_t>(grid.n);
  const std::size_t real = m * m * m;
  const std::size_t half = m * m * (m / 2 + 1);
  // kernel (real half) + padded real buffer + complex work buffer
  return half * sizeof(double) + real * sizeof(double) + half * sizeof(cplx);
}

void set_riesz_memory_cap(std::size_t bytes) { g_memory_cap = bytes; }
std::size_t riesz_memory_cap() { return g_memory_cap; }

RieszOperator build_riesz(const Grid& grid, double alpha, OriginRule rule) {
  const double a_alpha = riesz_normalization(alpha);
  if (riesz_memory_estimate(grid) > g_memory_cap)
    throw AllocationError("padded Riesz grid needs " + std::to_string(riesz_memory_estimate(grid)) +
                          " bytes, above the configured cap");

  const int n = grid.n;
  const int m = 2 * n;
  const auto& plan = detail::cube_fft(m);
  std::vector<double> samples(plan.real_size);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        const std::size_t id =
            (static_cast<std::size_t>(i) * m + static_cast<std::size_t>(j)) * m + k;
        samples[id] = riesz_kernel_sample(grid, alpha, a_alpha, padded_offset(i, n),
                                          padded_offset(j, n), padded_offset(k, n), rule);
      }

  std::vector<cplx> spec(plan.half_size);
  detail::forward(plan, samples.data(), spec.data());

  RieszOperator op;
  op.grid_ = grid;
  op.alpha_ = alpha;
  op.a_alpha_ = a_alpha;
  op.rule_ = rule;
  op.kernel_hat_.resize(spec.size());
  double max_re = 0.0, max_im = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    op.kernel_hat_[i] = spec[i].real();
    max_re = std::max(max_re, std::abs(spec[i].real()));
    max_im = std::max(max_im, std::abs(spec[i].imag()));
  }
  op.imag_residue_ = max_re > 0.0 ? max_im / max_re : 0.0;
  return op;
}

Field riesz_apply(const RieszOperator& op, const Field& f) {
  if (!(f.grid() == op.grid()))
    throw GridMismatch("riesz_apply: field and operator grids differ");
  const int n = op.grid().n;
  const int m = 2 * n;
  const auto& plan = detail::cube_fft(m);

  std::vector<double> padded(plan.real_size, 0.0);
  const auto in = f.values();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const std::size_t src = op.grid().index(i, j, 0);
      const std::size_t dst = (static_cast<std::size_t>(i) * m + static_cast<std::size_t>(j)) * m;
      std::copy_n(in.data() + src, n, padded.data() + dst);
    }

  std::vector<cplx> spec(plan.half_size);
  detail::forward(plan, padded.data(), spec.data());
  const auto& kh = op.kernel_hat();
  const auto ns = static_cast<long long>(spec.size());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < ns; ++i)
    spec[i] *= kh[i];
  detail::backward(plan, spec.data(), padded.data());

  const double scale = op.grid().cell_volume() / static_cast<double>(plan.real_size);
  Field out(op.grid());
  auto o = out.values();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const std::size_t dst = op.grid().index(i, j, 0);
      const std::size_t src = (static_cast<std::size_t>(i) * m + static_cast<std::size_t>(j)) * m;
      for (int k = 0; k < n; ++k)
        o[dst + k] = scale * padded[src + k];
    }
  return out;
}

NonlocalEval nonlocal_eval(const RieszOperator& op, const Field& f, double s) {
  if (!(s >= 1.0))
    throw RangeError("nonlocal exponent must be >= 1");
  const Field g = abs_pow(f, s);
  NonlocalEval out;
  out.potential = riesz_apply(op, g);
  out.value = inner(out.potential, g);
  return out;
}

double nonlocal_term(const RieszOperator& op, const Field& f, double s) {
  return nonlocal_eval(op, f, s).value;
}

} // namespace kc
