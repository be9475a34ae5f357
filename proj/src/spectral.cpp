#include "kc/spectral.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fft.hpp"
#include "kc/error.hpp"
#include "kc/reduce.hpp"

namespace kc {

using detail::cplx;

double Grid::wavenumber(int m) const {
  return std::numbers::pi / L * static_cast<double>(detail::signed_mode(m, n));
}

Grid make_grid(int n, double L) {
  if (n < 8 || !std::has_single_bit(static_cast<unsigned>(n)))
    throw RangeError("grid size n must be a power of two >= 8, got " + std::to_string(n));
  if (!std::isfinite(L) || !(L > 0.0))
    throw RangeError("box half-length L must be positive");
  return Grid{n, L};
}

Field::Field(const Grid& grid, double fill) : grid_(grid), values_(grid.size(), fill) {}

Field::Field(const Grid& grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid.size())
    throw GridMismatch("field value count does not match the grid");
}

void require_same_grid(const Field& a, const Field& b) {
  if (!(a.grid() == b.grid())) {
    std::ostringstream os;
    os << "grid mismatch: (n=" << a.grid().n << ", L=" << a.grid().L << ") vs (n="
       << b.grid().n << ", L=" << b.grid().L << ")";
    throw GridMismatch(os.str());
  }
}

Field& Field::operator+=(const Field& o) { return axpy(1.0, o); }
Field& Field::operator-=(const Field& o) { return axpy(-1.0, o); }

Field& Field::operator*=(double s) {
  const auto n = static_cast<long long>(values_.size());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i)
    values_[i] *= s;
  return *this;
}

Field& Field::axpy(double a, const Field& x) {
  require_same_grid(*this, x);
  const auto n = static_cast<long long>(values_.size());
  const double* xv = x.values_.data();
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i)
    values_[i] += a * xv[i];
  return *this;
}

bool Field::all_finite() const {
  for (double v : values_)
    if (!std::isfinite(v))
      return false;
  return true;
}

double Field::max_abs() const {
  double m = 0.0;
  for (double v : values_)
    m = std::max(m, std::abs(v));
  return m;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

double integrate(const Field& f) {
  const auto v = f.values();
  return f.grid().cell_volume() * deterministic_sum(v.size(), [&](std::size_t i) { return v[i]; });
}

double inner(const Field& f, const Field& g) {
  require_same_grid(f, g);
  const auto a = f.values();
  const auto b = g.values();
  return f.grid().cell_volume() *
         deterministic_sum(a.size(), [&](std::size_t i) { return a[i] * b[i]; });
}

double l2_norm_sq(const Field& f) { return inner(f, f); }

double inner(const FieldPair& a, const FieldPair& b) { return inner(a.u, b.u) + inner(a.v, b.v); }

namespace {

std::vector<cplx> spectrum(const Field& f) {
  const auto& plan = detail::cube_fft(f.grid().n);
  std::vector<cplx> out(plan.half_size);
  detail::forward(plan, f.values().data(), out.data());
  return out;
}

Field from_spectrum(const Grid& grid, std::vector<cplx>& spec) {
  const auto& plan = detail::cube_fft(grid.n);
  Field f(grid);
  detail::backward(plan, spec.data(), f.values().data());
  f *= 1.0 / static_cast<double>(plan.real_size);
  return f;
}

// Applies spec[i,j,k] *= mult(kx, ky, kz) over the half spectrum.
template <class Mult>
void apply_multiplier(const Grid& grid, std::vector<cplx>& spec, const Mult& mult) {
  const int n = grid.n;
  const int nh = n / 2 + 1;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    const double kx = grid.wavenumber(i);
    for (int j = 0; j < n; ++j) {
      const double ky = grid.wavenumber(j);
      for (int k = 0; k < nh; ++k)
        spec[detail::half_index(n, i, j, k)] *= mult(i, j, k, kx, ky, grid.wavenumber(k));
    }
  }
}

} // namespace

Field laplacian(const Field& f) {
  auto spec = spectrum(f);
  apply_multiplier(f.grid(), spec, [](int, int, int, double kx, double ky, double kz) {
    return cplx(-(kx * kx + ky * ky + kz * kz), 0.0);
  });
  return from_spectrum(f.grid(), spec);
}

double grad_norm_sq(const Field& f) {
  const auto spec = spectrum(f);
  const Grid& g = f.grid();
  const int n = g.n;
  const int nh = n / 2 + 1;
  // Half-spectrum entries with 0 < k < n/2 stand for a conjugate pair.
  const double s = deterministic_sum(spec.size(), [&](std::size_t idx) {
    const int k = static_cast<int>(idx % static_cast<std::size_t>(nh));
    const std::size_t ij = idx / static_cast<std::size_t>(nh);
    const int j = static_cast<int>(ij % static_cast<std::size_t>(n));
    const int i = static_cast<int>(ij / static_cast<std::size_t>(n));
    const double kx = g.wavenumber(i), ky = g.wavenumber(j), kz = g.wavenumber(k);
    const double w = (k == 0 || k == n / 2) ? 1.0 : 2.0;
    return w * (kx * kx + ky * ky + kz * kz) * std::norm(spec[idx]);
  });
  return g.cell_volume() * s / static_cast<double>(g.size());
}

std::array<Field, 3> gradient(const Field& f) {
  const auto base = spectrum(f);
  const int n = f.grid().n;
  std::array<Field, 3> out;
  for (int axis = 0; axis < 3; ++axis) {
    auto spec = base;
    apply_multiplier(f.grid(), spec, [&](int i, int j, int k, double kx, double ky, double kz) {
      const int m = axis == 0 ? i : axis == 1 ? j : k;
      if (m == n / 2)
        return cplx(0.0, 0.0);
      const double kk = axis == 0 ? kx : axis == 1 ? ky : kz;
      return cplx(0.0, kk);
    });
    out[axis] = from_spectrum(f.grid(), spec);
  }
  return out;
}

Field radial_derivative(const Field& f) {
  const auto g = gradient(f);
  const Grid& grid = f.grid();
  Field out(grid);
  const int n = grid.n;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const std::size_t id = grid.index(i, j, k);
        out[id] = grid.x(i) * g[0][id] + grid.x(j) * g[1][id] + grid.x(k) * g[2][id];
      }
  return out;
}

Field solve_screened(const Field& rhs, double a, double c) {
  if (!(a >= 0.0) || !(c > 0.0))
    throw RangeError("solve_screened needs a >= 0 and c > 0");
  auto spec = spectrum(rhs);
  apply_multiplier(rhs.grid(), spec, [&](int, int, int, double kx, double ky, double kz) {
    return cplx(1.0 / (a * (kx * kx + ky * ky + kz * kz) + c), 0.0);
  });
  return from_spectrum(rhs.grid(), spec);
}

Field abs_pow(const Field& f, double s) {
  Field out(f.grid());
  const auto in = f.values();
  auto o = out.values();
  const auto n = static_cast<long long>(in.size());
  if (s == 2.0) {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i)
      o[i] = in[i] * in[i];
  } else {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i)
      o[i] = std::pow(std::abs(in[i]), s);
  }
  return out;
}

Field signed_pow(const Field& f, double s) {
  Field out(f.grid());
  const auto in = f.values();
  auto o = out.values();
  const auto n = static_cast<long long>(in.size());
  if (s == 1.0) {
    std::copy(in.begin(), in.end(), o.begin());
    return out;
  }
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i) {
    const double x = in[i];
    o[i] = x == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(x), s), x);
  }
  return out;
}

namespace serial {

double integrate(const Field& f) {
  const auto v = f.values();
  return f.grid().cell_volume() *
         kc::serial::deterministic_sum(v.size(), [&](std::size_t i) { return v[i]; });
}

double inner(const Field& f, const Field& g) {
  require_same_grid(f, g);
  const auto a = f.values();
  const auto b = g.values();
  return f.grid().cell_volume() *
         kc::serial::deterministic_sum(a.size(), [&](std::size_t i) { return a[i] * b[i]; });
}

Field abs_pow(const Field& f, double s) {
  Field out(f.grid());
  const auto in = f.values();
  for (std::size_t i = 0; i < in.size(); ++i)
    out[i] = s == 2.0 ? in[i] * in[i] : std::pow(std::abs(in[i]), s);
  return out;
}

} // namespace serial
} // namespace kc
