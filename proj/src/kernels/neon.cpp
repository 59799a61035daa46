// NEON kernels for AArch64, where Advanced SIMD is part of the base ISA.

#include <arm_neon.h>

#include <algorithm>
#include <cmath>

#include "tables.hpp"

namespace attnfiqa::detail {
namespace {

constexpr std::size_t kLanes = 4;

// vfmaq_f32 is a fused multiply-add, so the per-element sequence matches the
// scalar reference exactly.
void gemm(const float* a, const float* b, float* c, std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const float* arow = a + i * k;
    float* crow = c + i * n;
    std::size_t j = 0;
    for (; j + 4 * kLanes <= n; j += 4 * kLanes) {
      float32x4_t acc0 = vdupq_n_f32(0.0f);
      float32x4_t acc1 = vdupq_n_f32(0.0f);
      float32x4_t acc2 = vdupq_n_f32(0.0f);
      float32x4_t acc3 = vdupq_n_f32(0.0f);
      for (std::size_t t = 0; t < k; ++t) {
        const float32x4_t av = vdupq_n_f32(arow[t]);
        const float* bp = b + t * n + j;
        acc0 = vfmaq_f32(acc0, av, vld1q_f32(bp));
        acc1 = vfmaq_f32(acc1, av, vld1q_f32(bp + kLanes));
        acc2 = vfmaq_f32(acc2, av, vld1q_f32(bp + 2 * kLanes));
        acc3 = vfmaq_f32(acc3, av, vld1q_f32(bp + 3 * kLanes));
      }
      vst1q_f32(crow + j, acc0);
      vst1q_f32(crow + j + kLanes, acc1);
      vst1q_f32(crow + j + 2 * kLanes, acc2);
      vst1q_f32(crow + j + 3 * kLanes, acc3);
    }
    for (; j + kLanes <= n; j += kLanes) {
      float32x4_t acc = vdupq_n_f32(0.0f);
      for (std::size_t t = 0; t < k; ++t)
        acc = vfmaq_f32(acc, vdupq_n_f32(arow[t]), vld1q_f32(b + t * n + j));
      vst1q_f32(crow + j, acc);
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
  for (; i + kLanes <= n; i += kLanes) vst1q_f32(y + i, vaddq_f32(vld1q_f32(y + i), vld1q_f32(x + i)));
  for (; i < n; ++i) y[i] += x[i];
}

double sum(const float* x, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const float32x4_t v = vld1q_f32(x + i);
    acc0 = vaddq_f64(acc0, vcvt_f64_f32(vget_low_f32(v)));
    acc1 = vaddq_f64(acc1, vcvt_high_f64_f32(v));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += x[i];
  return s;
}

double sum_sq_dev(const float* x, std::size_t n, double mean) {
  const float64x2_t mv = vdupq_n_f64(mean);
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const float32x4_t v = vld1q_f32(x + i);
    const float64x2_t d0 = vsubq_f64(vcvt_f64_f32(vget_low_f32(v)), mv);
    const float64x2_t d1 = vsubq_f64(vcvt_high_f64_f32(v), mv);
    acc0 = vaddq_f64(acc0, vmulq_f64(d0, d0));
    acc1 = vaddq_f64(acc1, vmulq_f64(d1, d1));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) {
    const double d = x[i] - mean;
    s += d * d;
  }
  return s;
}

float max_value(const float* x, std::size_t n) {
  float m = x[0];
  std::size_t i = 1;
  if (n >= kLanes) {
    float32x4_t acc = vld1q_f32(x);
    for (i = kLanes; i + kLanes <= n; i += kLanes) acc = vmaxq_f32(acc, vld1q_f32(x + i));
    m = vmaxvq_f32(acc);
  }
  for (; i < n; ++i) m = std::max(m, x[i]);
  return m;
}

void normalize_affine(const float* x, float* y, std::size_t n, float mean, float inv_std,
                      const float* gamma, const float* beta) {
  const float32x4_t mv = vdupq_n_f32(mean);
  const float32x4_t iv = vdupq_n_f32(inv_std);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const float32x4_t centered = vsubq_f32(vld1q_f32(x + i), mv);
    const float32x4_t scaled = vmulq_f32(centered, iv);
    const float32x4_t g = vmulq_f32(scaled, vld1q_f32(gamma + i));
    vst1q_f32(y + i, vaddq_f32(g, vld1q_f32(beta + i)));
  }
  for (; i < n; ++i) {
    const float centered = x[i] - mean;
    const float scaled = centered * inv_std;
    const float g = scaled * gamma[i];
    y[i] = g + beta[i];
  }
}

void scale(float* x, std::size_t n, float s) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) vst1q_f32(x + i, vmulq_n_f32(vld1q_f32(x + i), s));
  for (; i < n; ++i) x[i] *= s;
}

}  // namespace

const KernelTable kNeonKernels{
    Backend::kNeon, gemm, add, sum, sum_sq_dev, max_value, normalize_affine, scale,
};

}  // namespace attnfiqa::detail
