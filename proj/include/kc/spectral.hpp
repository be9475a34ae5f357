#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace kc {

/// Uniform periodic grid on the cube [-L, L)^3 with n points per axis.
/// Coordinates are x_i = -L + i h, h = 2L/n; index n/2 sits at the origin.
struct Grid {
  int n = 0;
  double L = 0.0;

  double h() const { return 2.0 * L / n; }
  double x(int i) const { return -L + i * h(); }
  double cell_volume() const { double s = h(); return s * s * s; }
  std::size_t size() const {
    const auto m = static_cast<std::size_t>(n);
    return m * m * m;
  }
  std::size_t index(int i, int j, int k) const {
    const auto m = static_cast<std::size_t>(n);
    return (static_cast<std::size_t>(i) * m + static_cast<std::size_t>(j)) * m +
           static_cast<std::size_t>(k);
  }
  /// Angular wavenumber of Fourier index m along one axis.
  double wavenumber(int m) const;

  friend bool operator==(const Grid&, const Grid&) = default;
};

/// Validates n (power of two, >= 8) and L > 0.
Grid make_grid(int n, double L);

/// Real scalar field sampled on a Grid, row-major (x slowest, z fastest).
class Field {
public:
  Field() = default;
  explicit Field(const Grid& grid, double fill = 0.0);
  Field(const Grid& grid, std::vector<double> values);

  template <class Fn>
  static Field from_function(const Grid& grid, Fn&& fn) {
    Field f(grid);
    const int n = grid.n;
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          f.values_[grid.index(i, j, k)] = fn(grid.x(i), grid.x(j), grid.x(k));
    return f;
  }

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  double at(int i, int j, int k) const { return values_[grid_.index(i, j, k)]; }

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(double s);
  /// this += a * x
  Field& axpy(double a, const Field& x);

  bool all_finite() const;
  double max_abs() const;

private:
  Grid grid_{};
  std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);

struct FieldPair {
  Field u, v;

  FieldPair& axpy(double a, const FieldPair& x) {
    u.axpy(a, x.u);
    v.axpy(a, x.v);
    return *this;
  }
};

/// Throws GridMismatch when the grids differ.
void require_same_grid(const Field& a, const Field& b);

// Reductions and spectral operators. Reductions use kc::deterministic_sum.

double integrate(const Field& f);
double inner(const Field& f, const Field& g);
double l2_norm_sq(const Field& f);
double inner(const FieldPair& a, const FieldPair& b);

/// Fourier-multiplier Laplacian (-|k|^2).
Field laplacian(const Field& f);
/// Parseval form of the integral of |grad f|^2.
double grad_norm_sq(const Field& f);
/// Spectral first derivatives; the Nyquist mode of the differentiated axis is dropped.
std::array<Field, 3> gradient(const Field& f);
/// x . grad f, the generator of the dilation f(x/s).
Field radial_derivative(const Field& f);
/// Solves (-a Lap + c) w = rhs spectrally; a >= 0, c > 0.
Field solve_screened(const Field& rhs, double a, double c);

/// |f|^s pointwise.
Field abs_pow(const Field& f, double s);
/// sign(f) |f|^{s} pointwise with 0 -> 0.
Field signed_pow(const Field& f, double s);

namespace serial {
// Single-threaded references used by tests and the benchmark.
double integrate(const Field& f);
double inner(const Field& f, const Field& g);
Field abs_pow(const Field& f, double s);
} // namespace serial

} // namespace kc
