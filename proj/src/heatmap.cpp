#include "attnfiqa/heatmap.hpp"

#include <algorithm>
#include <cmath>

#include "attnfiqa/error.hpp"

namespace attnfiqa {
namespace {

std::uint8_t round_half_up(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

}  // namespace

PatchMap patch_participation(const AttentionCapture& cap, std::size_t grid_height, std::size_t grid_width) {
  cap.validate();
  const std::size_t n = cap.num_tokens();
  if (grid_height * grid_width != n) {
    throw ShapeError("patch grid " + std::to_string(grid_height) + "x" + std::to_string(grid_width) +
                     " does not match " + std::to_string(n) + " tokens");
  }
  PatchMap map{grid_height, grid_width, std::vector<double>(n, 0.0)};
  for (const auto& a : cap.heads) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += static_cast<double>(a(i, j)) + static_cast<double>(a(j, i));
      map.values[i] += acc;
    }
  }
  const double norm = 1.0 / (2.0 * static_cast<double>(cap.num_heads()) * static_cast<double>(n));
  for (double& s : map.values) s *= norm;
  return map;
}

ColorScale build_color_scale(std::span<const PatchMap> maps) {
  ColorScale scale;
  bool any = false;
  for (const auto& m : maps) {
    for (double v : m.values) {
      if (!any) {
        scale.min = scale.max = v;
        any = true;
      } else {
        scale.min = std::min(scale.min, v);
        scale.max = std::max(scale.max, v);
      }
    }
  }
  if (!any) throw Error("cannot build a color scale from an empty batch");
  return scale;
}

double palette_position(double s, const ColorScale& scale) {
  if (scale.degenerate()) return 0.5;
  return std::clamp((s - scale.min) / (scale.max - scale.min), 0.0, 1.0);
}

Rgb palette_color(double position) {
  const double pos = std::clamp(position, 0.0, 1.0) * static_cast<double>(kPalette.size() - 1);
  const auto k = std::min(static_cast<std::size_t>(pos), kPalette.size() - 2);
  const double f = pos - static_cast<double>(k);
  const Rgb& a = kPalette[k];
  const Rgb& b = kPalette[k + 1];
  auto mix = [f](std::uint8_t x, std::uint8_t y) { return round_half_up(x + f * (double(y) - double(x))); };
  return {mix(a.r, b.r), mix(a.g, b.g), mix(a.b, b.b)};
}

Raster render_heatmap(const PatchMap& map, const ColorScale& scale, std::size_t patch_size) {
  if (map.values.size() != map.grid_height * map.grid_width) throw ShapeError("patch map size mismatch");
  if (scale.min > scale.max) throw Error("color scale has min > max");
  Raster img(map.grid_width * patch_size, map.grid_height * patch_size);
  for (std::size_t gy = 0; gy < map.grid_height; ++gy) {
    for (std::size_t gx = 0; gx < map.grid_width; ++gx) {
      const Rgb c = palette_color(palette_position(map.values[gy * map.grid_width + gx], scale));
      for (std::size_t y = gy * patch_size; y < (gy + 1) * patch_size; ++y) {
        for (std::size_t x = gx * patch_size; x < (gx + 1) * patch_size; ++x) {
          std::uint8_t* px = img.pixel(x, y);
          px[0] = c.r;
          px[1] = c.g;
          px[2] = c.b;
        }
      }
    }
  }
  return img;
}

Raster overlay(const Raster& base, const Raster& heat, double alpha) {
  if (base.width != heat.width || base.height != heat.height) {
    throw ShapeError("overlay: base and heatmap sizes differ");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error("overlay alpha must lie in [0, 1]");
  Raster out(base.width, base.height);
  for (std::size_t i = 0; i < out.rgb.size(); ++i) {
    out.rgb[i] = round_half_up((1.0 - alpha) * base.rgb[i] + alpha * heat.rgb[i]);
  }
  return out;
}

}  // namespace attnfiqa
