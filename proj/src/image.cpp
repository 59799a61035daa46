#include "attnfiqa/image.hpp"

#include <string>

#include "attnfiqa/error.hpp"

namespace attnfiqa {

ImageTensor preprocess(const Raster& raster, const ModelConfig& cfg) {
  if (raster.width != cfg.image_width || raster.height != cfg.image_height) {
    throw ShapeError("image is " + std::to_string(raster.width) + "x" + std::to_string(raster.height) +
                     ", model expects " + std::to_string(cfg.image_width) + "x" +
                     std::to_string(cfg.image_height));
  }
  ImageTensor t;
  t.height = raster.height;
  t.width = raster.width;
  t.data.resize(raster.rgb.size());
  for (std::size_t i = 0; i < raster.rgb.size(); ++i) {
    const float unit = static_cast<float>(raster.rgb[i]) / 255.0f;
    t.data[i] = (unit - cfg.pixel_mean) / cfg.pixel_std;
  }
  return t;
}

ImageTensor load_image(const std::filesystem::path& path, const ModelConfig& cfg) {
  try {
    return preprocess(read_ppm(path), cfg);
  } catch (const ShapeError& e) {
    throw ShapeError(path.string() + ": " + e.what());
  }
}

}  // namespace attnfiqa
