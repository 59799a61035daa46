#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>

namespace attnfiqa {

/// ViT architecture hyperparameters plus input preprocessing.
///
/// Stored on disk as a flat `key = value` text file; `#` starts a comment.
/// Keys: image_height, image_width, patch_size, embed_dim, num_blocks,
/// num_heads, mlp_ratio, ln_eps, pixel_mean, pixel_std.
struct ModelConfig {
  std::size_t image_height = 112;
  std::size_t image_width = 112;
  std::size_t patch_size = 8;
  std::size_t embed_dim = 512;
  std::size_t num_blocks = 12;
  std::size_t num_heads = 8;
  double mlp_ratio = 4.0;
  float ln_eps = 1e-5f;
  // Pixel normalization x -> (x / 255 - pixel_mean) / pixel_std.
  float pixel_mean = 0.5f;
  float pixel_std = 0.5f;

  std::size_t grid_height() const { return image_height / patch_size; }
  std::size_t grid_width() const { return image_width / patch_size; }
  /// Patch token count N. Note 112x112 with P = 8 gives N = 196.
  std::size_t num_patches() const { return grid_height() * grid_width(); }
  std::size_t patch_dim() const { return patch_size * patch_size * 3; }
  std::size_t head_dim() const { return embed_dim / num_heads; }
  std::size_t mlp_hidden() const;

  /// Throws FormatError when an invariant is violated.
  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

ModelConfig parse_config(std::string_view text);
ModelConfig load_config(const std::filesystem::path& path);
std::string format_config(const ModelConfig& cfg);
void save_config(const ModelConfig& cfg, const std::filesystem::path& path);

}  // namespace attnfiqa
