#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "attnfiqa/config.hpp"
#include "attnfiqa/image.hpp"
#include "attnfiqa/kernels.hpp"
#include "attnfiqa/matrix.hpp"
#include "attnfiqa/weights.hpp"

namespace attnfiqa {

/// Pre-softmax attention of every head in one block: heads[h] is the N x N
/// matrix (Q_h K_h^T) * scale, untouched by softmax.
struct AttentionCapture {
  std::size_t block = 0;  // 1-based
  std::vector<Matrix> heads;
  float scale = 1.0f;

  std::size_t num_heads() const { return heads.size(); }
  std::size_t num_tokens() const { return heads.empty() ? 0 : heads.front().rows(); }
  /// Throws ShapeError unless there is at least one head and all heads are
  /// equal-sized square matrices.
  void validate() const;
};

/// 1 / sqrt(D / Hh), the attention logit scale.
float attention_scale(const ModelConfig& cfg);

/// Splits an image into N = (H/P)(W/P) patch rows of length P*P*3.
/// Patches are ordered row-major over the grid; inside a patch, pixels are
/// row-major and each pixel contributes R, G, B.
Matrix patchify(const ImageTensor& img, const ModelConfig& cfg);

/// z0[i] = Y p_i + b + E_pos[i], with Y stored [D x P*P*3].
Matrix embed_patches(const Matrix& patches, const Matrix& proj, std::span<const float> bias,
                     const Matrix& pos_embed, Backend be = active_backend());

struct HeadResult {
  Matrix scores;  // pre-softmax, N x N
  Matrix output;  // softmax(scores) * V, N x D/Hh
};

/// Scaled dot-product attention from already projected q, k, v.
HeadResult attend(const Matrix& q, const Matrix& k, const Matrix& v, float scale,
                  Backend be = active_backend());

/// One attention head: projects z_norm with per-head slices [D x D/Hh].
HeadResult attention_head(const Matrix& z_norm, const Matrix& wq, const Matrix& wk, const Matrix& wv,
                          float scale, Backend be = active_backend());

struct BlockResult {
  Matrix state;
  std::optional<AttentionCapture> capture;
};

/// Pre-LN block: z' = MSA(LN1(z)) + z; out = MLP(LN2(z')) + z', where
/// MSA = Concat(heads) * W^O and MLP = GELU(x * fc1 + b1) * fc2 + b2.
/// `block_index` (1-based) only labels the capture.
BlockResult transformer_block(const Matrix& z, const BlockWeights& w, const ModelConfig& cfg,
                              bool capture, std::size_t block_index = 1,
                              Backend be = active_backend());

struct ForwardOptions {
  std::optional<std::size_t> capture_block;  // 1..L, unset selects the final block
  bool keep_states = false;       // record z_0 .. z_L
};

struct ForwardResult {
  Matrix final_state;
  AttentionCapture capture;
  std::vector<Matrix> states;  // filled only with keep_states
};

/// Full forward pass. Throws IndexError when capture_block is outside [1, L].
ForwardResult forward_with_capture(const ImageTensor& img, const WeightSet& ws, const ModelConfig& cfg,
                                   const ForwardOptions& opts = {}, Backend be = active_backend());

}  // namespace attnfiqa
