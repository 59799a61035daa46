#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "attnfiqa/ppm.hpp"
#include "attnfiqa/vit.hpp"

namespace attnfiqa {

struct Rgb {
  std::uint8_t r, g, b;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Blue-to-red diverging palette (cool-warm), 17 stops; stop 8 is the
/// neutral midpoint used for degenerate scales.
inline constexpr std::array<Rgb, 17> kPalette{{
    {59, 76, 192},   {78, 104, 216},  {98, 130, 234},  {119, 154, 247}, {141, 176, 254},
    {163, 194, 254}, {185, 208, 249}, {204, 217, 237}, {221, 220, 220}, {236, 211, 197},
    {245, 196, 172}, {247, 176, 147}, {244, 152, 122}, {235, 125, 98},  {221, 95, 75},
    {202, 59, 55},   {180, 4, 38},
}};

/// Per-patch statistic on the patch grid, row-major.
struct PatchMap {
  std::size_t grid_height = 0;
  std::size_t grid_width = 0;
  std::vector<double> values;
};

/// s_i = (1 / (2 H N)) * sum_h sum_j (A_h[i][j] + A_h[j][i]).
/// The mean of s over patches equals the concat-mean quality score.
PatchMap patch_participation(const AttentionCapture& cap, std::size_t grid_height, std::size_t grid_width);

struct ColorScale {
  double min = 0.0;
  double max = 0.0;
  bool degenerate() const { return !(max > min); }
};

/// Global range over every value of every map. Throws Error on an empty batch.
ColorScale build_color_scale(std::span<const PatchMap> maps);

/// (s - min) / (max - min) clamped to [0, 1]; 0.5 for a degenerate scale.
double palette_position(double s, const ColorScale& scale);

/// Linear interpolation between neighbouring stops, rounded half-up.
Rgb palette_color(double position);

/// Each patch becomes a solid patch_size x patch_size block.
Raster render_heatmap(const PatchMap& map, const ColorScale& scale, std::size_t patch_size);

/// (1 - alpha) * base + alpha * heat per channel, rounded half-up.
/// Throws ShapeError on size mismatch, Error when alpha is outside [0, 1].
Raster overlay(const Raster& base, const Raster& heat, double alpha);

}  // namespace attnfiqa
