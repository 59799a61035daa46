#include <doctest.h>

#include <cmath>

#include "attnfiqa/error.hpp"
#include "attnfiqa/heatmap.hpp"
#include "attnfiqa/scoring.hpp"
#include "support.hpp"

using namespace attnfiqa;

namespace {

PatchMap map_of(std::size_t gh, std::size_t gw, std::vector<double> v) {
  PatchMap m;
  m.grid_height = gh;
  m.grid_width = gw;
  m.values = std::move(v);
  return m;
}

Raster solid(std::size_t w, std::size_t h, Rgb c) {
  Raster r(w, h);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) {
      r.pixel(x, y)[0] = c.r;
      r.pixel(x, y)[1] = c.g;
      r.pixel(x, y)[2] = c.b;
    }
  return r;
}

}  // namespace

TEST_CASE("patch_participation: constant and hand-computed captures") {
  AttentionCapture constant;
  constant.heads = {Matrix{{2.5f, 2.5f}, {2.5f, 2.5f}}, Matrix{{2.5f, 2.5f}, {2.5f, 2.5f}}};
  for (double s : patch_participation(constant, 1, 2).values) CHECK(s == 2.5);

  AttentionCapture cap;
  cap.heads = {Matrix{{0, 2}, {4, 6}}};
  const PatchMap m = patch_participation(cap, 1, 2);
  REQUIRE(m.values.size() == 2);
  CHECK(m.values[0] == 1.5);  // (0 + 2 + 0 + 4) / 4
  CHECK(m.values[1] == 4.5);  // (4 + 6 + 2 + 6) / 4

  CHECK_THROWS_AS(patch_participation(cap, 2, 2), ShapeError);
}

TEST_CASE("patch_participation mean equals the concat-mean score (property)") {
  testing::Rng rng(51);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t gh = 1 + trial % 4, gw = 1 + trial % 5;
    const AttentionCapture cap = testing::random_capture(rng, 1 + trial % 6, gh * gw, -10.0f, 10.0f);
    const PatchMap m = patch_participation(cap, gh, gw);
    double mean = 0.0;
    for (double s : m.values) mean += s;
    mean /= double(m.values.size());
    const double q = concat_quality(cap, Metric::kMean).value;
    CHECK(std::abs(mean - q) <= 1e-6 * std::max(1.0, std::abs(q)));
  }
}

TEST_CASE("build_color_scale") {
  const std::vector<PatchMap> one{map_of(1, 3, {1, 2, 3})};
  CHECK(build_color_scale(one).min == 1.0);
  CHECK(build_color_scale(one).max == 3.0);
  const std::vector<PatchMap> two{map_of(1, 2, {0, 1}), map_of(1, 2, {5, 9})};
  CHECK(build_color_scale(two).min == 0.0);
  CHECK(build_color_scale(two).max == 9.0);
  const std::vector<PatchMap> flat{map_of(1, 2, {4, 4}), map_of(1, 2, {4, 4})};
  CHECK(build_color_scale(flat).degenerate());
  CHECK_THROWS_AS(build_color_scale(std::vector<PatchMap>{}), Error);
}

TEST_CASE("palette interpolation") {
  CHECK(palette_color(0.0) == kPalette.front());
  CHECK(palette_color(1.0) == kPalette.back());
  CHECK(palette_color(0.5) == kPalette[8]);
  for (std::size_t i = 0; i < kPalette.size(); ++i) CHECK(palette_color(double(i) / 16.0) == kPalette[i]);
  // Halfway between stops 0 and 1: (68.5, 90, 204) rounds half-up to (69, 90, 204).
  CHECK(palette_color(1.0 / 32.0) == Rgb{69, 90, 204});
  // Halfway between stops 15 and 16: (191, 31.5, 46.5) -> (191, 32, 47).
  CHECK(palette_color(31.0 / 32.0) == Rgb{191, 32, 47});
}

TEST_CASE("palette_position") {
  const ColorScale s{2.0, 6.0};
  CHECK(palette_position(2.0, s) == 0.0);
  CHECK(palette_position(6.0, s) == 1.0);
  CHECK(palette_position(3.0, s) == 0.25);
  CHECK(palette_position(-1.0, s) == 0.0);
  CHECK(palette_position(7.0, s) == 1.0);
  CHECK(palette_position(100.0, ColorScale{3.0, 3.0}) == 0.5);
}

TEST_CASE("render_heatmap: uniform extremes and degenerate midpoint") {
  const ColorScale s{1.0, 5.0};
  CHECK(render_heatmap(map_of(2, 2, {1, 1, 1, 1}), s, 3) == solid(6, 6, kPalette.front()));
  CHECK(render_heatmap(map_of(2, 2, {5, 5, 5, 5}), s, 3) == solid(6, 6, kPalette.back()));
  CHECK(render_heatmap(map_of(2, 2, {4, 4, 4, 4}), ColorScale{4, 4}, 3) == solid(6, 6, kPalette[8]));
}

TEST_CASE("render_heatmap: two patches, byte-checked") {
  // 1x2 grid with P = 2 gives a 4x2 image: two blue pixels then two red pixels per row.
  const Raster r = render_heatmap(map_of(1, 2, {0, 1}), ColorScale{0, 1}, 2);
  const std::string want_row = std::string("\x3b\x4c\xc0\x3b\x4c\xc0", 6) + std::string("\xb4\x04\x26\xb4\x04\x26", 6);
  const std::string want = "P6\n4 2\n255\n" + want_row + want_row;
  CHECK(encode_ppm(r) == want);
}

TEST_CASE("render_heatmap: patch order matches the grid") {
  // 2x2 grid, P = 1: values row-major over the grid.
  const Raster r = render_heatmap(map_of(2, 2, {0, 1, 0.5, 0}), ColorScale{0, 1}, 1);
  CHECK(Rgb{r.pixel(0, 0)[0], r.pixel(0, 0)[1], r.pixel(0, 0)[2]} == kPalette[0]);
  CHECK(Rgb{r.pixel(1, 0)[0], r.pixel(1, 0)[1], r.pixel(1, 0)[2]} == kPalette[16]);
  CHECK(Rgb{r.pixel(0, 1)[0], r.pixel(0, 1)[1], r.pixel(0, 1)[2]} == kPalette[8]);
}

TEST_CASE("rendering is monotone in the palette (property)") {
  testing::Rng rng(52);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  const ColorScale s{-4.0, 4.0};
  for (int trial = 0; trial < 2000; ++trial) {
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    const double pa = palette_position(a, s), pb = palette_position(b, s);
    CHECK(pa <= pb);
    CHECK(std::floor(pa * 16.0) <= std::floor(pb * 16.0));
  }
}

TEST_CASE("overlay") {
  testing::Rng rng(53);
  const Raster base = testing::random_raster(rng, 5, 4);
  const Raster heat = testing::random_raster(rng, 5, 4);
  CHECK(overlay(base, heat, 0.0) == base);
  CHECK(overlay(base, heat, 1.0) == heat);

  const Raster mixed = overlay(solid(3, 3, {0, 0, 0}), solid(3, 3, {255, 0, 0}), 0.5);
  CHECK(mixed == solid(3, 3, {128, 0, 0}));

  // Independent per-channel oracle with half-up rounding.
  const Raster got = overlay(base, heat, 0.3);
  for (std::size_t i = 0; i < base.rgb.size(); ++i) {
    const double v = 0.7 * base.rgb[i] + 0.3 * heat.rgb[i];
    CHECK(std::abs(double(got.rgb[i]) - std::floor(v + 0.5)) <= 0.0);
  }

  CHECK_THROWS_AS(overlay(base, testing::random_raster(rng, 4, 4), 0.5), ShapeError);
  CHECK_THROWS_AS(overlay(base, heat, 1.5), Error);
  CHECK_THROWS_AS(overlay(base, heat, -0.1), Error);
}
