#include <immintrin.h>

#include "decaylab/kernels.hpp"

namespace decaylab::kernels {
namespace {

double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* w, const double* f, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(
        acc0, _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(f + i)));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(w + i + 4),
                                             _mm256_loadu_pd(f + i + 4)));
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += w[i] * f[i];
  return s;
}

double max_avx2(const double* x, std::size_t n) {
  if (n < 4) {
    double m = x[0];
    for (std::size_t i = 1; i < n; ++i)
      if (x[i] > m) m = x[i];
    return m;
  }
  __m256d m4 = _mm256_loadu_pd(x);
  std::size_t i = 4;
  for (; i + 4 <= n; i += 4) m4 = _mm256_max_pd(m4, _mm256_loadu_pd(x + i));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m4);
  double m = lanes[0];
  for (int k = 1; k < 4; ++k)
    if (lanes[k] > m) m = lanes[k];
  for (; i < n; ++i)
    if (x[i] > m) m = x[i];
  return m;
}

double min_avx2(const double* x, std::size_t n) {
  if (n < 4) {
    double m = x[0];
    for (std::size_t i = 1; i < n; ++i)
      if (x[i] < m) m = x[i];
    return m;
  }
  __m256d m4 = _mm256_loadu_pd(x);
  std::size_t i = 4;
  for (; i + 4 <= n; i += 4) m4 = _mm256_min_pd(m4, _mm256_loadu_pd(x + i));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m4);
  double m = lanes[0];
  for (int k = 1; k < 4; ++k)
    if (lanes[k] < m) m = lanes[k];
  for (; i < n; ++i)
    if (x[i] < m) m = x[i];
  return m;
}

void stencil3_avx2(const double* lo, const double* di, const double* hi,
                   const double* u, double* out, std::size_t n) {
  if (n < 3) return;
  std::size_t i = 1;
  for (; i + 4 < n; i += 4) {
    const __m256d left = _mm256_mul_pd(_mm256_loadu_pd(lo + i), _mm256_loadu_pd(u + i - 1));
    const __m256d mid = _mm256_mul_pd(_mm256_loadu_pd(di + i), _mm256_loadu_pd(u + i));
    const __m256d right = _mm256_mul_pd(_mm256_loadu_pd(hi + i), _mm256_loadu_pd(u + i + 1));
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_add_pd(left, mid), right));
  }
  for (; i + 1 < n; ++i) {
    const double left = lo[i] * u[i - 1];
    const double mid = di[i] * u[i];
    const double right = hi[i] * u[i + 1];
    out[i] = (left + mid) + right;
  }
}

void implicit_rows_avx2(const double* diff, double dt, const double* lo,
                        const double* di, const double* hi, double* a,
                        double* b, double* c, std::size_t n) {
  const __m256d vdt = _mm256_set1_pd(dt);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d sign = _mm256_set1_pd(-0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d k = _mm256_mul_pd(vdt, _mm256_loadu_pd(diff + i));
    _mm256_storeu_pd(a + i, _mm256_xor_pd(sign, _mm256_mul_pd(k, _mm256_loadu_pd(lo + i))));
    _mm256_storeu_pd(b + i, _mm256_sub_pd(one, _mm256_mul_pd(k, _mm256_loadu_pd(di + i))));
    _mm256_storeu_pd(c + i, _mm256_xor_pd(sign, _mm256_mul_pd(k, _mm256_loadu_pd(hi + i))));
  }
  for (; i < n; ++i) {
    const double k = dt * diff[i];
    a[i] = -(k * lo[i]);
    b[i] = 1.0 - k * di[i];
    c[i] = -(k * hi[i]);
  }
}

constexpr KernelTable kAvx2{
    "avx2",         dot_avx2,           max_avx2, min_avx2,
    stencil3_avx2,  implicit_rows_avx2,
};

}  // namespace

const KernelTable& avx2_table_impl() noexcept { return kAvx2; }

}  // namespace decaylab::kernels
