// AVX2 + FMA kernels, 4 doubles per lane. Compiled with -mavx2 -mfma and only
// called after the dispatcher has checked CPUID.

#include "fdirnet/kernels.hpp"

#include <immintrin.h>

#ifndef __AVX2__
#error kernels_avx2.cpp must be compiled with -mavx2 -mfma
#endif

namespace fdirnet::kernels::avx2 {

namespace {

inline double hsum(__m256d v) noexcept {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) noexcept {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double squared_norm(const double* x, std::size_t n) noexcept { return dot(x, x, n); }

void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void gemv(std::size_t rows, std::size_t cols, const double* a, const double* x, double* y) noexcept {
  for (std::size_t r = 0; r < rows; ++r) y[r] = 0.0;
  for (std::size_t c = 0; c < cols; ++c) axpy(x[c], a + c * rows, y, rows);
}

void gemv_t(std::size_t rows, std::size_t cols, const double* a, const double* x, double* y) noexcept {
  for (std::size_t c = 0; c < cols; ++c) y[c] = dot(a + c * rows, x, rows);
}

}  // namespace fdirnet::kernels::avx2
