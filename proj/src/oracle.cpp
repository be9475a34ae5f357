#include "kc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <nlohmann/json.hpp>

#include "kc/error.hpp"
#include "kc/functionals.hpp"

namespace kc {

namespace {

// Neumaier-compensated running sum.
struct Compensated {
  double sum = 0.0, carry = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      carry += (sum - t) + x;
    else
      carry += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

double rel_diff(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

double max_rel_diff(const Field& a, const Field& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return den == 0.0 ? num : num / den;
}

} // namespace

Field riesz_direct(const Grid& grid, double alpha, const Field& f) {
  if (grid.n > 16)
    throw SizeError("riesz_direct is O(n^6); n must be at most 16, got " + std::to_string(grid.n));
  if (!(f.grid() == grid))
    throw GridMismatch("riesz_direct: field does not live on the given grid");
  const int n = grid.n, m = 2 * n - 1;
  const double a_alpha = riesz_normalization(alpha);
  std::vector<double> kernel(static_cast<std::size_t>(m) * m * m);
  for (int dx = -(n - 1); dx < n; ++dx)
    for (int dy = -(n - 1); dy < n; ++dy)
      for (int dz = -(n - 1); dz < n; ++dz)
        kernel[(static_cast<std::size_t>(dx + n - 1) * m + (dy + n - 1)) * m + (dz + n - 1)] =
            riesz_kernel_sample(grid, alpha, a_alpha, dx, dy, dz);

  const double h3 = grid.cell_volume();
  Field out(grid);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        Compensated s;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) {
              const double fy = f.at(a, b, c);
              if (fy == 0.0)
                continue;
              const std::size_t id =
                  (static_cast<std::size_t>(i - a + n - 1) * m + (j - b + n - 1)) * m + (k - c + n - 1);
              s.add(kernel[id] * fy);
            }
        out[grid.index(i, j, k)] = h3 * s.value();
      }
  return out;
}

FiberScan fiber_scan(const FiberPolynomial& poly, double t_min, double t_max, std::size_t count) {
  if (!(t_min > 0.0) || !(t_max > t_min) || !std::isfinite(t_max))
    throw RangeError("fiber_scan: need 0 < t_min < t_max");
  if (count < 2)
    throw RangeError("fiber_scan: need at least two points");
  FiberScan scan;
  scan.table.resize(count);
  const double lmin = std::log(t_min), step = (std::log(t_max) - lmin) / static_cast<double>(count - 1);
  // Powers advance by constant factors along the log-spaced points and are
  // recomputed from scratch every 64 points to stop drift.
  const double r4 = std::exp(4 * step), r8 = r4 * r4, rp = std::exp(poly.ep * step),
               rq = std::exp(poly.eq * step), rt = std::exp(step);
  double t = 0, t4 = 0, t8 = 0, tp = 0, tq = 0;
  double best = -INFINITY;
  for (std::size_t i = 0; i < count; ++i) {
    if (i % 64 == 0) {
      const double lt = lmin + step * static_cast<double>(i);
      t = std::exp(lt);
      t4 = std::exp(4 * lt);
      t8 = t4 * t4;
      tp = std::exp(poly.ep * lt);
      tq = std::exp(poly.eq * lt);
    } else {
      t *= rt;
      t4 *= r4;
      t8 *= r8;
      tp *= rp;
      tq *= rq;
    }
    FiberScanRow& row = scan.table[i];
    row.t = t;
    row.zeta = poly.c4 * t4 + poly.c8 * t8 - poly.cp * tp - poly.cq * tq;
    row.dzeta = (4 * poly.c4 * t4 + 8 * poly.c8 * t8 - poly.ep * poly.cp * tp - poly.eq * poly.cq * tq) / t;
    if (row.zeta > best) {
      best = row.zeta;
      scan.argmax_index = i;
    }
    if (i > 0) {
      const double prev = scan.table[i - 1].dzeta;
      if ((prev > 0.0 && row.dzeta <= 0.0) || (prev < 0.0 && row.dzeta >= 0.0))
        ++scan.sign_changes;
    }
  }
  scan.argmax = scan.table[scan.argmax_index].t;
  return scan;
}

double fd_directional(const ModelParams& prm, const RieszOperator& op, const FieldPair& pair,
                      const FieldPair& dir, double eps, FdTarget target) {
  auto shifted = [&](double s) {
    FieldPair w = pair;
    w.u.axpy(s, dir.u);
    w.v.axpy(s, dir.v);
    return target == FdTarget::Energy ? energy(prm, breakdown(prm, op, w))
                                      : reduced_value(prm, op, w);
  };
  return (shifted(eps) - shifted(-eps)) / (2.0 * eps);
}

ScalarFunctionals functionals_direct(const ModelParams& prm, const RieszOperator& op,
                                     const FieldPair& pair) {
  const Grid& g = pair.u.grid();
  const double h3 = g.cell_volume();
  const double p = prm.p(), q = prm.q(), a = prm.alpha;

  auto grad_sq = [&](const Field& w) {
    Compensated s;
    for (const Field& d : gradient(w))
      for (double x : d.values())
        s.add(x * x);
    return h3 * s.value();
  };
  auto nonlocal = [&](const Field& w, double e) {
    Field m(g);
    for (std::size_t i = 0; i < w.size(); ++i)
      m[i] = std::pow(std::abs(w[i]), e);
    const Field pot = riesz_apply(op, m);
    Compensated s;
    for (std::size_t i = 0; i < w.size(); ++i)
      s.add(pot[i] * m[i]);
    return h3 * s.value();
  };
  Compensated uu, vv, uv;
  for (std::size_t i = 0; i < pair.u.size(); ++i) {
    uu.add(pair.u[i] * pair.u[i]);
    vv.add(pair.v[i] * pair.v[i]);
    uv.add(pair.u[i] * pair.v[i]);
  }
  const double Gu = grad_sq(pair.u), Gv = grad_sq(pair.v);
  const double Du = nonlocal(pair.u, p), Dv = nonlocal(pair.v, q);
  const double grad = prm.a1 * Gu + prm.a2 * Gv;
  const double mass = prm.V1 * h3 * uu.value() + prm.V2 * h3 * vv.value();
  const double kirch = prm.b1 * Gu * Gu + prm.b2 * Gv * Gv;
  const double mu = prm.mu * Du, nu = prm.nu * Dv, cross = prm.lambda * h3 * uv.value();

  ScalarFunctionals out;
  out.I = grad / 2 + mass / 2 + kirch / 4 - mu / (2 * p) - nu / (2 * q) - cross;
  out.N = grad + mass + kirch - mu - nu - 2 * cross;
  out.P = grad / 2 + 3 * mass / 2 + kirch / 2 - (3 + a) * mu / (2 * p) - (3 + a) * nu / (2 * q) -
          3 * cross;
  out.J = 2 * grad + 4 * mass + 2 * kirch - (p + a + 3) * mu / p - (q + a + 3) * nu / q - 8 * cross;
  return out;
}

Field random_smooth_field(const Grid& grid, std::uint64_t seed, int bumps) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> centre(-grid.L / 6, grid.L / 6);
  std::uniform_real_distribution<double> width(grid.L / 10, grid.L / 7);
  std::uniform_real_distribution<double> amp(0.5, 1.5);
  struct Bump {
    double x, y, z, s, a;
  };
  std::vector<Bump> bs;
  for (int b = 0; b < bumps; ++b) {
    Bump bump{centre(rng), centre(rng), centre(rng), 0, 0};
    bump.s = width(rng);
    bump.a = amp(rng);
    bs.push_back(bump);
  }
  return Field::from_function(grid, [&](double x, double y, double z) {
    double s = 0.0;
    for (const Bump& b : bs) {
      const double r2 = (x - b.x) * (x - b.x) + (y - b.y) * (y - b.y) + (z - b.z) * (z - b.z);
      s += b.a * std::exp(-r2 / (2 * b.s * b.s));
    }
    return s;
  });
}

std::vector<Check> run_oracle_certification(std::uint64_t seed) {
  std::vector<Check> checks;
  std::mt19937_64 rng(seed);

  const Grid g8 = make_grid(8, 4.0);
  for (double alpha : {0.5, 1.0, 2.0}) {
    const Field f = random_smooth_field(g8, rng());
    const double err = max_rel_diff(riesz_apply(build_riesz(g8, alpha), f), riesz_direct(g8, alpha, f));
    checks.push_back({"riesz_direct_alpha_" + std::to_string(alpha).substr(0, 3), err <= 1e-10, err, 1e-10});
  }

  {
    std::uniform_real_distribution<double> coef(0.1, 10.0), expo(8.5, 20.0);
    int bad = 0;
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      FiberPolynomial poly{coef(rng), coef(rng), coef(rng), coef(rng), expo(rng), expo(rng)};
      const FiberScan scan = fiber_scan(poly, 1e-2, 1e2, 100001);
      const double t = solve_fiber_max(poly);
      const double dlog = std::abs(std::log(t / scan.argmax));
      worst = std::max(worst, dlog);
      if (scan.sign_changes != 1 || dlog > 4.0 * std::log(1e4) / 100000.0)
        ++bad;
    }
    checks.push_back({"fiber_scan_vs_solver", bad == 0, worst, 4.0 * std::log(1e4) / 100000.0});
    const double t1 = solve_fiber_max({1, 1, 0.5, 0.5, 12, 12});
    checks.push_back({"fiber_closed_form", std::abs(t1 - 1.0) <= 1e-10, std::abs(t1 - 1.0), 1e-10});
  }

  const ModelParams prm;
  const Grid g32 = make_grid(32, 8.0);
  const RieszOperator op = build_riesz(g32, prm.alpha);
  const FieldPair pair{random_smooth_field(g32, rng()), random_smooth_field(g32, rng())};
  const FieldPair dir{random_smooth_field(g32, rng()), random_smooth_field(g32, rng())};

  {
    const double pairing = inner(first_variation(prm, op, pair), dir);
    const double fd = fd_directional(prm, op, pair, dir, 1e-5);
    const double err = rel_diff(pairing, fd);
    checks.push_back({"first_variation_fd", err <= 1e-5, err, 1e-5});
  }
  {
    const ReducedEval re = reduced_value_and_gradient(prm, op, pair);
    const double fd = fd_directional(prm, op, pair, dir, 1e-5, FdTarget::Reduced);
    const double err = rel_diff(inner(re.grad, dir), fd);
    checks.push_back({"reduced_gradient_fd", err <= 1e-5, err, 1e-5});
  }
  {
    const Breakdown bd = breakdown(prm, op, pair);
    const ScalarFunctionals d = functionals_direct(prm, op, pair);
    const double err = std::max({rel_diff(energy(prm, bd), d.I), rel_diff(np_functional(prm, bd), d.J),
                                 rel_diff(pohozaev(prm, bd), d.P), rel_diff(nehari(prm, bd), d.N)});
    checks.push_back({"functionals_second_path", err <= 1e-10, err, 1e-10});
  }
  return checks;
}

nlohmann::json checks_to_json(const std::vector<Check>& checks) {
  nlohmann::json out = nlohmann::json::array();
  for (const Check& c : checks)
    out.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"bound", c.bound}});
  return out;
}

} // namespace kc
