#include "fft.hpp"

#include <map>
#include <memory>
#include <mutex>

#include <fftw3.h>
#ifdef _OPENMP
#include <omp.h>
#endif

namespace kc::detail {

namespace {

std::mutex g_plan_mutex;
std::map<int, std::unique_ptr<CubeFft>> g_plans;
bool g_threads_ready = false;

} // namespace

const CubeFft& cube_fft(int n) {
  std::lock_guard lock(g_plan_mutex);
  if (auto it = g_plans.find(n); it != g_plans.end())
    return *it->second;

#ifdef KC_FFTW_THREADS
  if (!g_threads_ready) {
    fftw_init_threads();
    g_threads_ready = true;
  }
  fftw_plan_with_nthreads(omp_get_max_threads());
#else
  (void)g_threads_ready;
#endif

  auto p = std::make_unique<CubeFft>();
  p->n = n;
  p->real_size = static_cast<std::size_t>(n) * n * n;
  p->half_size = static_cast<std::size_t>(n) * n * (n / 2 + 1);
  double* r = fftw_alloc_real(p->real_size);
  fftw_complex* c = fftw_alloc_complex(p->half_size);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  p->forward_plan = fftw_plan_dft_r2c_3d(n, n, n, r, c, flags | FFTW_PRESERVE_INPUT);
  p->backward_plan = fftw_plan_dft_c2r_3d(n, n, n, c, r, flags | FFTW_DESTROY_INPUT);
  fftw_free(r);
  fftw_free(c);
  auto [it, ok] = g_plans.emplace(n, std::move(p));
  return *it->second;
}

void forward(const CubeFft& plan, const double* in, cplx* out) {
  fftw_execute_dft_r2c(static_cast<fftw_plan>(plan.forward_plan), const_cast<double*>(in),
                       reinterpret_cast<fftw_complex*>(out));
}

void backward(const CubeFft& plan, cplx* in, double* out) {
  fftw_execute_dft_c2r(static_cast<fftw_plan>(plan.backward_plan),
                       reinterpret_cast<fftw_complex*>(in), out);
}

} // namespace kc::detail
