#include "kc/constants.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <list>
#include <numbers>

#include <nlohmann/json.hpp>

#include "fft.hpp"
#include "kc/error.hpp"

namespace kc {

double talenti_constant() { return 3.0 * std::pow(std::numbers::pi / 2.0, 4.0 / 3.0); }

namespace {

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 3.0))
    throw RangeError("alpha must lie in (0, 3)");
}

// log Q and its L2 gradient.
using LogQuotient = std::function<double(const Field&, Field*)>;

// Spectral interpolant on the 2n grid, Nyquist modes dropped.
Field upsample(const Field& w) {
  const int n = w.grid().n, m = 2 * n;
  const auto& fn = detail::cube_fft(n);
  const auto& fm = detail::cube_fft(m);
  std::vector<detail::cplx> a(fn.half_size), b(fm.half_size, 0.0);
  detail::forward(fn, w.values().data(), a.data());
  for (int i = 0; i < n; ++i) {
    const int si = detail::signed_mode(i, n);
    if (2 * std::abs(si) == n)
      continue;
    for (int j = 0; j < n; ++j) {
      const int sj = detail::signed_mode(j, n);
      if (2 * std::abs(sj) == n)
        continue;
      for (int k = 0; k < n / 2; ++k)
        b[detail::half_index(m, (si + m) % m, (sj + m) % m, k)] = a[detail::half_index(n, i, j, k)];
    }
  }
  Field out(make_grid(m, w.grid().L));
  detail::backward(fm, b.data(), out.values().data());
  out *= 1.0 / static_cast<double>(fn.real_size);
  return out;
}

// Adjoint of upsample divided by 8: spectral truncation back to n.
Field downsample(const Field& g, const Grid& coarse) {
  const int n = coarse.n, m = 2 * n;
  const auto& fn = detail::cube_fft(n);
  const auto& fm = detail::cube_fft(m);
  std::vector<detail::cplx> b(fm.half_size), a(fn.half_size, 0.0);
  detail::forward(fm, g.values().data(), b.data());
  for (int i = 0; i < n; ++i) {
    const int si = detail::signed_mode(i, n);
    if (2 * std::abs(si) == n)
      continue;
    for (int j = 0; j < n; ++j) {
      const int sj = detail::signed_mode(j, n);
      if (2 * std::abs(sj) == n)
        continue;
      for (int k = 0; k < n / 2; ++k)
        a[detail::half_index(n, i, j, k)] = b[detail::half_index(m, (si + m) % m, (sj + m) % m, k)];
    }
  }
  Field out(coarse);
  detail::backward(fn, a.data(), out.values().data());
  out *= 1.0 / static_cast<double>(fm.real_size);
  return out;
}

// The L6 norm is integrated on the upsampled interpolant; plain trapezoid
// sums undercount grid-scale bumps and the descent learns to exploit that.
LogQuotient sobolev_log() {
  return [](const Field& w, Field* grad) {
    const double num = grad_norm_sq(w);
    const Field fine = upsample(w);
    const Field w5 = signed_pow(fine, 5.0);
    const double den = inner(w5, fine);
    if (grad) {
      Field lap = laplacian(w);
      *grad = Field(w.grid());
      grad->axpy(-2.0 / num, lap);
      grad->axpy(-2.0 / den, downsample(w5, w.grid()));  // (1/3) * 6 w^5 / den
    }
    return std::log(num) - std::log(den) / 3.0;
  };
}

LogQuotient upper_log(const RieszOperator& op) {
  const double s = 3.0 + op.alpha();
  return [&op, s](const Field& w, Field* grad) {
    const double num = grad_norm_sq(w);
    NonlocalEval ne = nonlocal_eval(op, w, s);
    if (grad) {
      Field lap = laplacian(w);
      Field t = signed_pow(w, s - 1.0);
      auto tv = t.values();
      const auto pv = ne.potential.values();
      for (std::size_t i = 0; i < tv.size(); ++i)
        tv[i] *= pv[i];
      *grad = Field(w.grid());
      grad->axpy(-2.0 / num, lap);
      grad->axpy(-2.0 / ne.value, t);  // (1/s) * 2 s (I*|w|^s)|w|^{s-2}w / D
    }
    return std::log(num) - std::log(ne.value) / s;
  };
}

LogQuotient lower_log(const RieszOperator& op) {
  const double s = (3.0 + op.alpha()) / 3.0;
  return [&op, s](const Field& w, Field* grad) {
    const double num = l2_norm_sq(w);
    NonlocalEval ne = nonlocal_eval(op, w, s);
    const double gamma = 3.0 / (3.0 + op.alpha());
    if (grad) {
      Field t = signed_pow(w, s - 1.0);
      auto tv = t.values();
      const auto pv = ne.potential.values();
      for (std::size_t i = 0; i < tv.size(); ++i)
        tv[i] *= pv[i];
      *grad = Field(w.grid());
      grad->axpy(2.0 / num, w);
      grad->axpy(-gamma * 2.0 * s / ne.value, t);
    }
    return std::log(num) - gamma * std::log(ne.value);
  };
}

double taper(double x, double L, double frac) {
  const double a = std::abs(x), r0 = frac * L, r1 = 0.95 * L;
  if (a <= r0)
    return 1.0;
  if (a >= r1)
    return 0.0;
  const double c = std::cos(0.5 * std::numbers::pi * (a - r0) / (r1 - r0));
  return c * c;
}

Field make_mask(const Grid& g, double frac) {
  return Field::from_function(g, [&](double x, double y, double z) {
    return taper(x, g.L, frac) * taper(y, g.L, frac) * taper(z, g.L, frac);
  });
}

Field multiply(Field a, const Field& b) {
  auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i)
    av[i] *= bv[i];
  return a;
}

// Preconditioned descent on log Q with updates confined by the mask.
double refine(const LogQuotient& lq, Field w, const Field& mask, double ell,
              const EstimateOptions& opts) {
  const double c = 1.0 / (ell * ell);
  Field grad;
  double f = lq(w, &grad);
  double tau = 0.0;
  int quiet = 0;
  for (int it = 0; it < opts.max_iters; ++it) {
    Field d = multiply(solve_screened(multiply(grad, mask), 1.0, c), mask);
    d *= -1.0;
    const double slope = inner(grad, d);
    if (!(slope < 0.0))
      break;
    if (tau == 0.0)
      tau = 0.05 * w.max_abs() / std::max(d.max_abs(), 1e-300);
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls, tau *= 0.5) {
      Field trial = w;
      trial.axpy(tau, d);
      const double ft = lq(trial, nullptr);
      if (std::isfinite(ft) && ft <= f + 1e-4 * tau * slope) {
        const double drop = f - ft;
        w = std::move(trial);
        f = lq(w, &grad);
        accepted = true;
        quiet = drop < opts.tol ? quiet + 1 : 0;
        break;
      }
    }
    if (!accepted || quiet >= 5)
      break;
    tau *= 2.0;
  }
  return std::exp(f);
}

struct Profile {
  std::string name;
  std::function<double(double r2, double lam)> fn;
};

BestConstantEstimate estimate(const Grid& grid, const EstimateOptions& opts, const Profile& prof,
                              const std::function<LogQuotient(const Grid&)>& make) {
  if (opts.levels < 1)
    throw RangeError("estimate: levels must be at least 1");
  BestConstantEstimate out;
  out.trial_profile = prof.name;
  std::vector<int> sizes;
  for (int k = opts.levels - 1; k >= 0; --k) {
    const int n = grid.n >> k;
    if (n >= 16 || n == grid.n)
      sizes.push_back(n);
  }
  for (int n : sizes) {
    const Grid g = make_grid(n, grid.L);
    const LogQuotient lq = make(g);
    const Field mask = make_mask(g, opts.mask_fraction);
    // Trial: the best profile width on a short geometric scan.
    double best = 0.0, best_lam = 0.0;
    Field best_w;
    for (double lam_h : {1.5, 2.0, 3.0, 4.0, 6.0, 8.0}) {
      const double lam = lam_h * g.h();
      if (lam > 0.25 * g.L)
        break;
      Field w = multiply(Field::from_function(g, [&](double x, double y, double z) {
                           return prof.fn(x * x + y * y + z * z, lam);
                         }),
                         mask);
      const double q = std::exp(lq(w, nullptr));
      if (best_lam == 0.0 || q < best) {
        best = q;
        best_lam = lam;
        best_w = std::move(w);
      }
    }
    const double refined = std::min(best, refine(lq, best_w, mask, best_lam, opts));
    out.refinement_trend.emplace_back(n, refined);
    if (n == grid.n) {
      out.trial_value = best;
      out.value = refined;
      out.trial_profile = prof.name + ", lambda = " + std::to_string(best_lam);
    }
  }
  out.extrapolated = richardson_limit(out.refinement_trend);
  return out;
}

} // namespace

double richardson_limit(const std::vector<std::pair<int, double>>& trend) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (trend.size() < 3)
    return nan;
  const double v0 = trend[trend.size() - 3].second, v1 = trend[trend.size() - 2].second,
               v2 = trend.back().second;
  const double d1 = v1 - v0, d2 = v2 - v1;
  if (d1 == 0.0)
    return d2 == 0.0 ? v2 : nan;
  const double r = d2 / d1;
  if (!(r > 0.0 && r < 1.0))
    return nan;
  return v2 + d2 * r / (1.0 - r);
}

double sobolev_quotient(const Field& w) { return std::exp(sobolev_log()(w, nullptr)); }

double upper_critical_quotient(const RieszOperator& op, const Field& w) {
  return std::exp(upper_log(op)(w, nullptr));
}

double lower_critical_quotient(const RieszOperator& op, const Field& w) {
  return std::exp(lower_log(op)(w, nullptr));
}

BestConstantEstimate estimate_sobolev(const Grid& grid, const EstimateOptions& opts) {
  const Profile talenti{"(lambda^2 + |x|^2)^(-1/2)", [](double r2, double lam) {
                          return 1.0 / std::sqrt(lam * lam + r2);
                        }};
  return estimate(grid, opts, talenti, [](const Grid&) { return sobolev_log(); });
}

BestConstantEstimate estimate_S_star(const Grid& grid, double alpha, const EstimateOptions& opts) {
  require_alpha(alpha);
  const Profile talenti{"(lambda^2 + |x|^2)^(-1/2)", [](double r2, double lam) {
                          return 1.0 / std::sqrt(lam * lam + r2);
                        }};
  std::list<RieszOperator> ops;  // stable addresses for the captured operators
  return estimate(grid, opts, talenti, [&](const Grid& g) {
    ops.push_back(build_riesz(g, alpha));
    return upper_log(ops.back());
  });
}

BestConstantEstimate estimate_S_lower(const Grid& grid, double alpha, const EstimateOptions& opts) {
  require_alpha(alpha);
  const Profile prof{"(lambda^2 + |x|^2)^(-3/2)", [](double r2, double lam) {
                       return std::pow(lam * lam + r2, -1.5);
                     }};
  std::list<RieszOperator> ops;  // stable addresses for the captured operators
  return estimate(grid, opts, prof, [&](const Grid& g) {
    ops.push_back(build_riesz(g, alpha));
    return lower_log(ops.back());
  });
}

double threshold_upper(const ModelParams& prm, double S_star) {
  if (validate_params(prm) != ExponentRegime::UpperHalfCritical)
    throw RegimeError("threshold_upper needs the upper half critical regime");
  if (!(S_star > 0.0))
    throw RangeError("S* must be positive");
  const double a = prm.alpha;
  return (a + 1.0) / (4.0 * (3.0 + a)) * prm.nu *
         std::pow(prm.a2 * S_star / prm.nu, (3.0 + a) / (2.0 + a));
}

LowerThreshold threshold_lower(const ModelParams& prm, double S_lower) {
  if (validate_params(prm) != ExponentRegime::LowerHalfCritical)
    throw RegimeError("threshold_lower needs the lower half critical regime");
  if (!(S_lower > 0.0))
    throw RangeError("S_* must be positive");
  const double a = prm.alpha;
  const double base =
      4.0 * (3.0 + a) * prm.V1 * (1.0 - prm.delta()) * S_lower / (prm.mu * (12.0 + a));
  const double pre = a / (2.0 * (3.0 + a)) * prm.mu;
  return {pre * std::pow(base, (3.0 + a) / 3.0), pre * std::pow(base, (3.0 + a) / a)};
}

nlohmann::json estimate_to_json(const BestConstantEstimate& e) {
  nlohmann::json trend = nlohmann::json::array();
  for (const auto& [n, v] : e.refinement_trend)
    trend.push_back({{"n", n}, {"value", v}});
  return {{"value", e.value},
          {"trial_value", e.trial_value},
          {"trial_profile", e.trial_profile},
          {"extrapolated", std::isfinite(e.extrapolated) ? nlohmann::json(e.extrapolated) : nlohmann::json()},
          {"refinement_trend", trend}};
}

} // namespace kc
