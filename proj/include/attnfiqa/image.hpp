#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "attnfiqa/config.hpp"
#include "attnfiqa/ppm.hpp"

namespace attnfiqa {

/// Preprocessed RGB image: `data` is row-major with channels interleaved
/// (HWC), values (x / 255 - pixel_mean) / pixel_std.
struct ImageTensor {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<float> data;

  float at(std::size_t y, std::size_t x, std::size_t c) const {
    return data[(y * width + x) * 3 + c];
  }
};

/// Throws ShapeError when the raster size differs from the config.
ImageTensor preprocess(const Raster& raster, const ModelConfig& cfg);
ImageTensor load_image(const std::filesystem::path& path, const ModelConfig& cfg);

}  // namespace attnfiqa
