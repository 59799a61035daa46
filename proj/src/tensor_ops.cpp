#include "attnfiqa/tensor_ops.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "attnfiqa/error.hpp"

namespace attnfiqa {
namespace {

std::string shape_str(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b, Backend be) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul inner dimension mismatch: " + shape_str(a) + " * " + shape_str(b));
  }
  Matrix c(a.rows(), b.cols());
  if (c.empty()) return c;
  kernels_for(be).gemm(a.data(), b.data(), c.data(), a.rows(), a.cols(), b.cols());
  return c;
}

Matrix matmul_transposed(const Matrix& a, const Matrix& b, Backend be) {
  if (a.cols() != b.cols()) {
    throw ShapeError("matmul_transposed inner dimension mismatch: " + shape_str(a) + " * (" +
                     shape_str(b) + ")^T");
  }
  return matmul(a, transpose(b), be);
}

Matrix layer_norm(const Matrix& x, std::span<const float> gamma, std::span<const float> beta,
                  float eps, Backend be) {
  const std::size_t d = x.cols();
  if (d == 0 || gamma.size() != d || beta.size() != d) {
    throw ShapeError("layer_norm parameter width mismatch for input " + shape_str(x));
  }
  if (!(eps > 0.0f)) throw Error("layer_norm eps must be positive");
  const KernelTable& k = kernels_for(be);
  Matrix y(x.rows(), d);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const float* xr = x.row(r).data();
    const double mean = k.sum(xr, d) / static_cast<double>(d);
    const double var = k.sum_sq_dev(xr, d, mean) / static_cast<double>(d);
    const double inv_std = 1.0 / std::sqrt(var + static_cast<double>(eps));
    k.normalize_affine(xr, y.row(r).data(), d, static_cast<float>(mean),
                       static_cast<float>(inv_std), gamma.data(), beta.data());
  }
  return y;
}

Matrix softmax_rows(const Matrix& m, Backend be) {
  const KernelTable& k = kernels_for(be);
  Matrix out(m.rows(), m.cols());
  if (m.cols() == 0) return out;
  std::vector<double> e(m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto in = m.row(r);
    const double mx = k.max_value(in.data(), in.size());
    double total = 0.0;
    for (std::size_t j = 0; j < in.size(); ++j) {
      e[j] = std::exp(static_cast<double>(in[j]) - mx);
      total += e[j];
    }
    auto o = out.row(r);
    for (std::size_t j = 0; j < in.size(); ++j) o[j] = static_cast<float>(e[j] / total);
  }
  return out;
}

float gelu(float x) {
  const double xd = x;
  return static_cast<float>(0.5 * xd * (1.0 + std::erf(xd / std::numbers::sqrt2)));
}

Matrix gelu(const Matrix& x) {
  Matrix y(x.rows(), x.cols());
  auto out = y.values();
  const auto in = x.values();
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = gelu(in[i]);
  return y;
}

void add_row_bias(Matrix& m, std::span<const float> bias, Backend be) {
  if (bias.size() != m.cols()) throw ShapeError("bias width mismatch for " + shape_str(m));
  const KernelTable& k = kernels_for(be);
  for (std::size_t r = 0; r < m.rows(); ++r) k.add(m.row(r).data(), bias.data(), bias.size());
}

void add_inplace(Matrix& a, const Matrix& b, Backend be) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("elementwise add shape mismatch: " + shape_str(a) + " vs " + shape_str(b));
  }
  if (a.empty()) return;
  kernels_for(be).add(a.data(), b.data(), a.size());
}

void scale_inplace(Matrix& m, float s, Backend be) {
  if (m.empty()) return;
  kernels_for(be).scale(m.data(), m.size(), s);
}

}  // namespace attnfiqa
