#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "attnfiqa/config.hpp"
#include "attnfiqa/matrix.hpp"
#include "attnfiqa/tensor_file.hpp"

namespace attnfiqa {

/// Learnable tensors of one pre-LN transformer block. The query/key/value
/// projections are stored fused as [D x D]; head h uses columns
/// [h * D/Hh, (h + 1) * D/Hh).
struct BlockWeights {
  std::vector<float> ln1_gamma, ln1_beta;
  Matrix wq, wk, wv;  // [D x D]
  Matrix wo;          // [D x D]
  std::vector<float> ln2_gamma, ln2_beta;
  Matrix fc1;  // [D x hidden]
  std::vector<float> fc1_bias;
  Matrix fc2;  // [hidden x D]
  std::vector<float> fc2_bias;
};

struct WeightSet {
  Matrix patch_proj;  // [D x P*P*3]
  std::vector<float> patch_bias;
  Matrix pos_embed;  // [N x D]
  std::vector<BlockWeights> blocks;
};

struct TensorSpec {
  std::string name;
  std::vector<std::uint64_t> shape;
};

/// Canonical tensor names and shapes for a config, in file order:
///   patch_embed.weight, patch_embed.bias, pos_embed, then per block i (0-based)
///   blocks.i.ln1.{gamma,beta}, blocks.i.attn.{wq,wk,wv,wo},
///   blocks.i.ln2.{gamma,beta}, blocks.i.mlp.{fc1.weight,fc1.bias,fc2.weight,fc2.bias}
std::vector<TensorSpec> weight_manifest(const ModelConfig& cfg);

/// Throws ManifestError for a missing tensor, ShapeError for a wrong shape.
void validate_weights(const WeightSet& ws, const ModelConfig& cfg);

std::vector<NamedTensor> to_named_tensors(const WeightSet& ws, const ModelConfig& cfg);
WeightSet from_named_tensors(std::vector<NamedTensor> tensors, const ModelConfig& cfg);

/// Validates first; nothing is written for an invalid set.
void save_weights(const WeightSet& ws, const ModelConfig& cfg, const std::filesystem::path& path);
WeightSet load_weights(const std::filesystem::path& path, const ModelConfig& cfg);

/// Weight set with every tensor zero-filled at the manifest shapes.
WeightSet zero_weights(const ModelConfig& cfg);

}  // namespace attnfiqa
