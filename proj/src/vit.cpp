#include "attnfiqa/vit.hpp"

#include <cmath>
#include <string>

#include "attnfiqa/error.hpp"
#include "attnfiqa/tensor_ops.hpp"

namespace attnfiqa {

void AttentionCapture::validate() const {
  if (heads.empty()) throw ShapeError("attention capture has no heads");
  const std::size_t n = heads.front().rows();
  for (const auto& h : heads) {
    if (h.rows() != n || h.cols() != n || n == 0) {
      throw ShapeError("attention capture heads must be equal non-empty square matrices");
    }
  }
}

float attention_scale(const ModelConfig& cfg) {
  return static_cast<float>(1.0 / std::sqrt(static_cast<double>(cfg.head_dim())));
}

Matrix patchify(const ImageTensor& img, const ModelConfig& cfg) {
  if (img.height != cfg.image_height || img.width != cfg.image_width ||
      img.data.size() != img.height * img.width * 3) {
    throw ShapeError("image tensor does not match model input size");
  }
  const std::size_t p = cfg.patch_size;
  const std::size_t gw = cfg.grid_width();
  Matrix out(cfg.num_patches(), cfg.patch_dim());
  for (std::size_t patch = 0; patch < out.rows(); ++patch) {
    const std::size_t y0 = (patch / gw) * p;
    const std::size_t x0 = (patch % gw) * p;
    auto row = out.row(patch);
    std::size_t k = 0;
    for (std::size_t dy = 0; dy < p; ++dy) {
      const float* src = img.data.data() + ((y0 + dy) * img.width + x0) * 3;
      for (std::size_t i = 0; i < p * 3; ++i) row[k++] = src[i];
    }
  }
  return out;
}

Matrix embed_patches(const Matrix& patches, const Matrix& proj, std::span<const float> bias,
                     const Matrix& pos_embed, Backend be) {
  if (proj.cols() != patches.cols() || bias.size() != proj.rows() ||
      pos_embed.rows() != patches.rows() || pos_embed.cols() != proj.rows()) {
    throw ShapeError("patch embedding shapes are inconsistent");
  }
  Matrix z = matmul_transposed(patches, proj, be);
  add_row_bias(z, bias, be);
  add_inplace(z, pos_embed, be);
  return z;
}

HeadResult attend(const Matrix& q, const Matrix& k, const Matrix& v, float scale, Backend be) {
  if (q.cols() != k.cols() || k.rows() != v.rows()) throw ShapeError("attention q/k/v shapes disagree");
  HeadResult r;
  r.scores = matmul_transposed(q, k, be);
  scale_inplace(r.scores, scale, be);
  r.output = matmul(softmax_rows(r.scores, be), v, be);
  return r;
}

HeadResult attention_head(const Matrix& z_norm, const Matrix& wq, const Matrix& wk, const Matrix& wv,
                          float scale, Backend be) {
  if (wq.rows() != z_norm.cols() || wk.rows() != z_norm.cols() || wv.rows() != z_norm.cols() ||
      wq.cols() != wk.cols()) {
    throw ShapeError("attention head projection shapes disagree with the token width");
  }
  return attend(matmul(z_norm, wq, be), matmul(z_norm, wk, be), matmul(z_norm, wv, be), scale, be);
}

BlockResult transformer_block(const Matrix& z, const BlockWeights& w, const ModelConfig& cfg,
                              bool capture, std::size_t block_index, Backend be) {
  const std::size_t d = cfg.embed_dim;
  const std::size_t heads = cfg.num_heads;
  const std::size_t hd = cfg.head_dim();
  if (z.cols() != d) throw ShapeError("token width does not match embed_dim");
  const float scale = attention_scale(cfg);

  // Column slice h of z_norm * W equals z_norm * (column slice h of W) bit for
  // bit: each output element is the same fma chain either way.
  const Matrix zn = layer_norm(z, w.ln1_gamma, w.ln1_beta, cfg.ln_eps, be);
  const Matrix q = matmul(zn, w.wq, be);
  const Matrix k = matmul(zn, w.wk, be);
  const Matrix v = matmul(zn, w.wv, be);

  BlockResult result;
  if (capture) {
    result.capture.emplace();
    result.capture->block = block_index;
    result.capture->scale = scale;
    result.capture->heads.reserve(heads);
  }
  Matrix concat(z.rows(), d);
  for (std::size_t h = 0; h < heads; ++h) {
    HeadResult hr = attend(slice_cols(q, h * hd, hd), slice_cols(k, h * hd, hd),
                           slice_cols(v, h * hd, hd), scale, be);
    place_cols(concat, hr.output, h * hd);
    if (capture) result.capture->heads.push_back(std::move(hr.scores));
  }

  Matrix mid = matmul(concat, w.wo, be);
  add_inplace(mid, z, be);

  Matrix hidden = matmul(layer_norm(mid, w.ln2_gamma, w.ln2_beta, cfg.ln_eps, be), w.fc1, be);
  add_row_bias(hidden, w.fc1_bias, be);
  Matrix out = matmul(gelu(hidden), w.fc2, be);
  add_row_bias(out, w.fc2_bias, be);
  add_inplace(out, mid, be);
  result.state = std::move(out);
  return result;
}

ForwardResult forward_with_capture(const ImageTensor& img, const WeightSet& ws, const ModelConfig& cfg,
                                   const ForwardOptions& opts, Backend be) {
  const std::size_t capture_block = opts.capture_block.value_or(cfg.num_blocks);
  if (capture_block < 1 || capture_block > cfg.num_blocks) {
    throw IndexError("capture block " + std::to_string(capture_block) + " outside [1, " +
                     std::to_string(cfg.num_blocks) + "]");
  }
  if (ws.blocks.size() != cfg.num_blocks) throw ShapeError("weight set block count differs from config");

  ForwardResult r;
  Matrix z = embed_patches(patchify(img, cfg), ws.patch_proj, ws.patch_bias, ws.pos_embed, be);
  if (opts.keep_states) r.states.push_back(z);
  for (std::size_t b = 1; b <= cfg.num_blocks; ++b) {
    BlockResult br = transformer_block(z, ws.blocks[b - 1], cfg, b == capture_block, b, be);
    if (br.capture) r.capture = std::move(*br.capture);
    z = std::move(br.state);
    if (opts.keep_states) r.states.push_back(z);
  }
  r.final_state = std::move(z);
  return r;
}

}  // namespace attnfiqa
