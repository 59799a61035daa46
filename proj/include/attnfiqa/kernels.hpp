#pragma once

// Low-level float kernels with a scalar reference implementation and SIMD
// variants (AVX2+FMA on x86-64, NEON on AArch64). The active variant is chosen
// once per process from CPU features; ATTNFIQA_BACKEND=scalar|avx2|neon
// overrides the choice.
//
// Equivalence contract between variants:
//   gemm, add, scale, max_value            bitwise identical to scalar
//   sum, sum_sq_dev                        equal up to reassociation (double lanes)
//   normalize_affine                       bitwise identical given equal mean/inv_std

#include <cstddef>
#include <string_view>
#include <vector>

namespace attnfiqa {

enum class Backend { kScalar, kAvx2, kNeon };

std::string_view backend_name(Backend b);

struct KernelTable {
  Backend backend;

  // c[m x n] = a[m x k] * b[k x n], all row-major and densely packed.
  // Accumulation is per output element, in increasing t, via fused multiply-add.
  void (*gemm)(const float* a, const float* b, float* c, std::size_t m, std::size_t k,
               std::size_t n);

  // y[i] += x[i]
  void (*add)(float* y, const float* x, std::size_t n);

  // Sum with double accumulation.
  double (*sum)(const float* x, std::size_t n);

  // Sum of (x[i] - mean)^2 with double accumulation.
  double (*sum_sq_dev)(const float* x, std::size_t n, double mean);

  float (*max_value)(const float* x, std::size_t n);

  // y[i] = ((x[i] - mean) * inv_std) * gamma[i] + beta[i], float arithmetic,
  // no contraction.
  void (*normalize_affine)(const float* x, float* y, std::size_t n, float mean, float inv_std,
                           const float* gamma, const float* beta);

  // x[i] *= s
  void (*scale)(float* x, std::size_t n, float s);
};

/// Kernel table for a specific backend. Throws Error if the backend is not
/// compiled in or not supported by this CPU.
const KernelTable& kernels_for(Backend b);

/// Backends usable on this machine, scalar first.
std::vector<Backend> available_backends();

/// The process-wide default backend (best available unless overridden by
/// ATTNFIQA_BACKEND). Fixed after first use.
Backend active_backend();

inline const KernelTable& active_kernels() { return kernels_for(active_backend()); }

}  // namespace attnfiqa
