#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace attnfiqa {

/// 8-bit RGB raster, row-major, channels interleaved.
struct Raster {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> rgb;

  Raster() = default;
  Raster(std::size_t w, std::size_t h) : width(w), height(h), rgb(w * h * 3, 0) {}

  std::uint8_t* pixel(std::size_t x, std::size_t y) { return rgb.data() + (y * width + x) * 3; }
  const std::uint8_t* pixel(std::size_t x, std::size_t y) const {
    return rgb.data() + (y * width + x) * 3;
  }

  friend bool operator==(const Raster&, const Raster&) = default;
};

/// Parses binary PPM (P6) with maxval 255. Header comments are accepted.
Raster parse_ppm(std::string_view bytes);
Raster read_ppm(const std::filesystem::path& path);

/// "P6\n<w> <h>\n255\n" followed by the raw pixels.
std::string encode_ppm(const Raster& img);
void write_ppm(const Raster& img, const std::filesystem::path& path);

}  // namespace attnfiqa
