#pragma once

#include <span>

#include "attnfiqa/kernels.hpp"
#include "attnfiqa/matrix.hpp"

namespace attnfiqa {

inline constexpr float kDefaultLayerNormEps = 1e-5f;

/// a[m x k] * b[k x n]. Throws ShapeError on inner-dimension mismatch.
Matrix matmul(const Matrix& a, const Matrix& b, Backend be = active_backend());

/// a[m x k] * b[n x k]^T.
Matrix matmul_transposed(const Matrix& a, const Matrix& b, Backend be = active_backend());

/// Per-row layer normalization with population variance, then gamma/beta.
Matrix layer_norm(const Matrix& x, std::span<const float> gamma, std::span<const float> beta,
                  float eps = kDefaultLayerNormEps, Backend be = active_backend());

/// Row-wise softmax with per-row max subtraction.
Matrix softmax_rows(const Matrix& m, Backend be = active_backend());

/// Elementwise exact-erf GELU: x * Phi(x).
Matrix gelu(const Matrix& x);
float gelu(float x);

/// Adds `bias` to every row. Throws ShapeError if bias.size() != m.cols().
void add_row_bias(Matrix& m, std::span<const float> bias, Backend be = active_backend());

/// a += b elementwise; shapes must match.
void add_inplace(Matrix& a, const Matrix& b, Backend be = active_backend());

void scale_inplace(Matrix& m, float s, Backend be = active_backend());

}  // namespace attnfiqa
