// AVX2 + FMA kernels. This translation unit is compiled with -mavx2 -mfma and
// only reached after a runtime CPU check.

#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "tables.hpp"

namespace attnfiqa::detail {
namespace {

constexpr std::size_t kLanes = 8;

// Per output element the update sequence is fma over t = 0..k-1 starting from
// +0, exactly as in the scalar reference, so results match bit for bit.
void gemm(const float* a, const float* b, float* c, std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const float* arow = a + i * k;
    float* crow = c + i * n;
    std::size_t j = 0;
    for (; j + 4 * kLanes <= n; j += 4 * kLanes) {
      __m256 acc0 = _mm256_setzero_ps();
      __m256 acc1 = _mm256_setzero_ps();
      __m256 acc2 = _mm256_setzero_ps();
      __m256 acc3 = _mm256_setzero_ps();
      for (std::size_t t = 0; t < k; ++t) {
        const __m256 av = _mm256_set1_ps(arow[t]);
        const float* bp = b + t * n + j;
        acc0 = _mm256_fmadd_ps(av, _mm256_loadu_ps(bp), acc0);
        acc1 = _mm256_fmadd_ps(av, _mm256_loadu_ps(bp + kLanes), acc1);
        acc2 = _mm256_fmadd_ps(av, _mm256_loadu_ps(bp + 2 * kLanes), acc2);
        acc3 = _mm256_fmadd_ps(av, _mm256_loadu_ps(bp + 3 * kLanes), acc3);
      }
      _mm256_storeu_ps(crow + j, acc0);
      _mm256_storeu_ps(crow + j + kLanes, acc1);
      _mm256_storeu_ps(crow + j + 2 * kLanes, acc2);
      _mm256_storeu_ps(crow + j + 3 * kLanes, acc3);
    }
    for (; j + kLanes <= n; j += kLanes) {
      __m256 acc = _mm256_setzero_ps();
      for (std::size_t t = 0; t < k; ++t)
        acc = _mm256_fmadd_ps(_mm256_set1_ps(arow[t]), _mm256_loadu_ps(b + t * n + j), acc);
      _mm256_storeu_ps(crow + j, acc);
    }
    for (; j < n; ++j) {
      float acc = 0.0f;
      for (std::size_t t = 0; t < k; ++t) acc = std::fma(arow[t], b[t * n + j], acc);
      crow[j] = acc;
    }
  }
}

void add(float* y, const float* x, std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes)
    _mm256_storeu_ps(y + i, _mm256_add_ps(_mm256_loadu_ps(y + i), _mm256_loadu_ps(x + i)));
  for (; i < n; ++i) y[i] += x[i];
}

double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double sum(const float* x, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    acc0 = _mm256_add_pd(acc0, _mm256_cvtps_pd(_mm_loadu_ps(x + i)));
    acc1 = _mm256_add_pd(acc1, _mm256_cvtps_pd(_mm_loadu_ps(x + i + 4)));
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i];
  return s;
}

double sum_sq_dev(const float* x, std::size_t n, double mean) {
  const __m256d mv = _mm256_set1_pd(mean);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d d0 = _mm256_sub_pd(_mm256_cvtps_pd(_mm_loadu_ps(x + i)), mv);
    const __m256d d1 = _mm256_sub_pd(_mm256_cvtps_pd(_mm_loadu_ps(x + i + 4)), mv);
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(d0, d0));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(d1, d1));
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) {
    const double d = x[i] - mean;
    s += d * d;
  }
  return s;
}

float max_value(const float* x, std::size_t n) {
  if (n < kLanes) {
    float m = x[0];
    for (std::size_t i = 1; i < n; ++i) m = std::max(m, x[i]);
    return m;
  }
  __m256 acc = _mm256_loadu_ps(x);
  std::size_t i = kLanes;
  for (; i + kLanes <= n; i += kLanes) acc = _mm256_max_ps(acc, _mm256_loadu_ps(x + i));
  alignas(32) float lanes[kLanes];
  _mm256_store_ps(lanes, acc);
  float m = lanes[0];
  for (std::size_t l = 1; l < kLanes; ++l) m = std::max(m, lanes[l]);
  for (; i < n; ++i) m = std::max(m, x[i]);
  return m;
}

void normalize_affine(const float* x, float* y, std::size_t n, float mean, float inv_std,
                      const float* gamma, const float* beta) {
  const __m256 mv = _mm256_set1_ps(mean);
  const __m256 iv = _mm256_set1_ps(inv_std);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256 centered = _mm256_sub_ps(_mm256_loadu_ps(x + i), mv);
    const __m256 scaled = _mm256_mul_ps(centered, iv);
    const __m256 g = _mm256_mul_ps(scaled, _mm256_loadu_ps(gamma + i));
    _mm256_storeu_ps(y + i, _mm256_add_ps(g, _mm256_loadu_ps(beta + i)));
  }
  for (; i < n; ++i) {
    const float centered = x[i] - mean;
    const float scaled = centered * inv_std;
    const float g = scaled * gamma[i];
    y[i] = g + beta[i];
  }
}

void scale(float* x, std::size_t n, float s) {
  const __m256 sv = _mm256_set1_ps(s);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes)
    _mm256_storeu_ps(x + i, _mm256_mul_ps(_mm256_loadu_ps(x + i), sv));
  for (; i < n; ++i) x[i] *= s;
}

}  // namespace

const KernelTable kAvx2Kernels{
    Backend::kAvx2, gemm, add, sum, sum_sq_dev, max_value, normalize_affine, scale,
};

}  // namespace attnfiqa::detail
