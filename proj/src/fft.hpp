#pragma once

// Cached FFTW plans for cubic real <-> half-complex transforms. Plans are
// created once per side length with FFTW_ESTIMATE | FFTW_UNALIGNED so that
// they can be executed on any buffer from any thread.

#include <complex>
#include <cstddef>
#include <vector>

namespace kc::detail {

struct CubeFft {
  int n = 0;
  std::size_t real_size = 0;  // n^3
  std::size_t half_size = 0;  // n * n * (n/2 + 1)
  void* forward_plan = nullptr;
  void* backward_plan = nullptr;
};

using cplx = std::complex<double>;

/// Plans for an n^3 cube; thread-safe, never freed.
const CubeFft& cube_fft(int n);

/// Unnormalized r2c; `in` is preserved.
void forward(const CubeFft& plan, const double* in, cplx* out);
/// Unnormalized c2r; `in` is destroyed.
void backward(const CubeFft& plan, cplx* in, double* out);

/// Index of the half-spectrum entry (i, j, k), k in [0, n/2].
inline std::size_t half_index(int n, int i, int j, int k) {
  const auto m = static_cast<std::size_t>(n);
  return (static_cast<std::size_t>(i) * m + static_cast<std::size_t>(j)) * (m / 2 + 1) +
         static_cast<std::size_t>(k);
}

/// Signed Fourier index for position m of an n-point axis.
inline int signed_mode(int m, int n) { return m <= n / 2 ? m : m - n; }

} // namespace kc::detail
