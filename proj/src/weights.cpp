#include "attnfiqa/weights.hpp"

#include <map>

#include "attnfiqa/error.hpp"

namespace attnfiqa {
namespace {

using Shape = std::vector<std::uint64_t>;

std::string block_prefix(std::size_t i) { return "blocks." + std::to_string(i) + "."; }

// Visits every tensor slot of a weight set in manifest order. The callback
// receives (name, expected shape, matrix-or-null, vector-or-null).
template <typename WS, typename Fn>
void for_each_slot(WS& ws, const ModelConfig& cfg, Fn&& fn) {
  const std::uint64_t d = cfg.embed_dim;
  const std::uint64_t hidden = cfg.mlp_hidden();
  fn("patch_embed.weight", Shape{d, cfg.patch_dim()}, &ws.patch_proj, nullptr);
  fn("patch_embed.bias", Shape{d}, nullptr, &ws.patch_bias);
  fn("pos_embed", Shape{cfg.num_patches(), d}, &ws.pos_embed, nullptr);
  for (std::size_t i = 0; i < cfg.num_blocks; ++i) {
    auto* b = i < ws.blocks.size() ? &ws.blocks[i] : nullptr;
    const std::string p = block_prefix(i);
    auto mat = [&](auto member) { return b ? &(b->*member) : nullptr; };
    fn(p + "ln1.gamma", Shape{d}, nullptr, mat(&BlockWeights::ln1_gamma));
    fn(p + "ln1.beta", Shape{d}, nullptr, mat(&BlockWeights::ln1_beta));
    fn(p + "attn.wq", Shape{d, d}, mat(&BlockWeights::wq), nullptr);
    fn(p + "attn.wk", Shape{d, d}, mat(&BlockWeights::wk), nullptr);
    fn(p + "attn.wv", Shape{d, d}, mat(&BlockWeights::wv), nullptr);
    fn(p + "attn.wo", Shape{d, d}, mat(&BlockWeights::wo), nullptr);
    fn(p + "ln2.gamma", Shape{d}, nullptr, mat(&BlockWeights::ln2_gamma));
    fn(p + "ln2.beta", Shape{d}, nullptr, mat(&BlockWeights::ln2_beta));
    fn(p + "mlp.fc1.weight", Shape{d, hidden}, mat(&BlockWeights::fc1), nullptr);
    fn(p + "mlp.fc1.bias", Shape{hidden}, nullptr, mat(&BlockWeights::fc1_bias));
    fn(p + "mlp.fc2.weight", Shape{hidden, d}, mat(&BlockWeights::fc2), nullptr);
    fn(p + "mlp.fc2.bias", Shape{d}, nullptr, mat(&BlockWeights::fc2_bias));
  }
}

template <typename M>
Shape matrix_shape(const M& m) {
  return Shape{m.rows(), m.cols()};
}

}  // namespace

std::vector<TensorSpec> weight_manifest(const ModelConfig& cfg) {
  cfg.validate();
  std::vector<TensorSpec> out;
  const WeightSet empty;
  for_each_slot(empty, cfg, [&](const std::string& name, const Shape& shape, const Matrix*,
                                const std::vector<float>*) { out.push_back({name, shape}); });
  return out;
}

void validate_weights(const WeightSet& ws, const ModelConfig& cfg) {
  cfg.validate();
  if (ws.blocks.size() > cfg.num_blocks) {
    throw ManifestError("weight set has " + std::to_string(ws.blocks.size()) +
                        " blocks, config declares " + std::to_string(cfg.num_blocks));
  }
  for_each_slot(ws, cfg, [](const std::string& name, const Shape& shape, const Matrix* m,
                            const std::vector<float>* v) {
    const bool absent = m ? m->empty() : (v == nullptr || v->empty());
    if ((m == nullptr && v == nullptr) || absent) throw ManifestError("missing tensor '" + name + "'");
    const Shape got = m ? matrix_shape(*m) : Shape{v->size()};
    if (got != shape) {
      throw ShapeError("tensor '" + name + "' has shape " + shape_string(got) + ", expected " +
                       shape_string(shape));
    }
  });
}

std::vector<NamedTensor> to_named_tensors(const WeightSet& ws, const ModelConfig& cfg) {
  validate_weights(ws, cfg);
  std::vector<NamedTensor> out;
  for_each_slot(ws, cfg, [&](const std::string& name, const Shape& shape, const Matrix* m,
                             const std::vector<float>* v) {
    NamedTensor t{name, shape, {}};
    if (m) {
      t.data.assign(m->values().begin(), m->values().end());
    } else {
      t.data = *v;
    }
    out.push_back(std::move(t));
  });
  return out;
}

WeightSet from_named_tensors(std::vector<NamedTensor> tensors, const ModelConfig& cfg) {
  cfg.validate();
  std::map<std::string, NamedTensor*> by_name;
  for (auto& t : tensors) by_name.emplace(t.name, &t);

  WeightSet ws;
  ws.blocks.resize(cfg.num_blocks);
  std::size_t used = 0;
  for_each_slot(ws, cfg, [&](const std::string& name, const Shape& shape, Matrix* m,
                             std::vector<float>* v) {
    auto it = by_name.find(name);
    if (it == by_name.end()) throw ManifestError("missing tensor '" + name + "'");
    NamedTensor& t = *it->second;
    if (t.shape != shape) {
      std::string msg = "tensor '" + name + "' has shape " + shape_string(t.shape) + ", expected " +
                        shape_string(shape);
      if (name == "pos_embed" && t.shape.size() == 2 && t.shape[0] == shape[0] + 1 &&
          t.shape[1] == shape[1]) {
        msg += " (one extra token: class-token checkpoints must drop it before import)";
      }
      throw ShapeError(msg);
    }
    if (m) {
      *m = Matrix(shape[0], shape[1], std::move(t.data));
    } else {
      *v = std::move(t.data);
    }
    ++used;
  });
  if (used != tensors.size()) {
    for (const auto& t : tensors) {
      bool known = false;
      for_each_slot(ws, cfg, [&](const std::string& name, const Shape&, const Matrix*,
                                 const std::vector<float>*) { known = known || name == t.name; });
      if (!known) throw ManifestError("unexpected tensor '" + t.name + "'");
    }
  }
  return ws;
}

void save_weights(const WeightSet& ws, const ModelConfig& cfg, const std::filesystem::path& path) {
  write_tensor_file(path, to_named_tensors(ws, cfg));
}

WeightSet load_weights(const std::filesystem::path& path, const ModelConfig& cfg) {
  return from_named_tensors(read_tensor_file(path), cfg);
}

WeightSet zero_weights(const ModelConfig& cfg) {
  cfg.validate();
  WeightSet ws;
  ws.blocks.resize(cfg.num_blocks);
  for_each_slot(ws, cfg, [](const std::string&, const Shape& shape, Matrix* m, std::vector<float>* v) {
    if (m) {
      *m = Matrix(shape[0], shape[1]);
    } else {
      v->assign(shape[0], 0.0f);
    }
  });
  return ws;
}

}  // namespace attnfiqa
