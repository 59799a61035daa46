// Reference kernels. Every SIMD variant is tested against these.

#include <algorithm>
#include <cmath>

#include "tables.hpp"

namespace attnfiqa::detail {
namespace {

void gemm(const float* a, const float* b, float* c, std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    float* crow = c + i * n;
    std::fill(crow, crow + n, 0.0f);
    for (std::size_t t = 0; t < k; ++t) {
      const float av = a[i * k + t];
      const float* brow = b + t * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] = std::fma(av, brow[j], crow[j]);
    }
  }
}

void add(float* y, const float* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += x[i];
}

double sum(const float* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

double sum_sq_dev(const float* x, std::size_t n, double mean) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - mean;
    s += d * d;
  }
  return s;
}

float max_value(const float* x, std::size_t n) {
  float m = x[0];
  for (std::size_t i = 1; i < n; ++i) m = std::max(m, x[i]);
  return m;
}

void normalize_affine(const float* x, float* y, std::size_t n, float mean, float inv_std,
                      const float* gamma, const float* beta) {
  for (std::size_t i = 0; i < n; ++i) {
    const float centered = x[i] - mean;
    const float scaled = centered * inv_std;
    const float g = scaled * gamma[i];
    y[i] = g + beta[i];
  }
}

void scale(float* x, std::size_t n, float s) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= s;
}

}  // namespace

const KernelTable kScalarKernels{
    Backend::kScalar, gemm, add, sum, sum_sq_dev, max_value, normalize_affine, scale,
};

}  // namespace attnfiqa::detail
