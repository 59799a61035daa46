#pragma once

// Shared fixtures for the unit and acceptance suites.

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "attnfiqa/config.hpp"
#include "attnfiqa/image.hpp"
#include "attnfiqa/matrix.hpp"
#include "attnfiqa/ppm.hpp"
#include "attnfiqa/vit.hpp"
#include "attnfiqa/weights.hpp"

namespace testing {

using Rng = std::mt19937_64;

attnfiqa::Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, float lo = -1.0f, float hi = 1.0f);
std::vector<float> random_vector(Rng& rng, std::size_t n, float lo = -1.0f, float hi = 1.0f);

/// 8x8 image, P = 2 (N = 16), D = 8, Hh = 4 heads, L blocks, mlp_ratio 2.
attnfiqa::ModelConfig toy_config(std::size_t blocks = 2, std::size_t heads = 4);

/// Gaussian-ish random weights of moderate scale (LN gammas near 1).
attnfiqa::WeightSet random_weights(Rng& rng, const attnfiqa::ModelConfig& cfg, float scale = 0.3f);

attnfiqa::Raster random_raster(Rng& rng, std::size_t w, std::size_t h);
attnfiqa::Raster constant_raster(std::size_t w, std::size_t h, std::uint8_t v);

/// Random capture with `heads` matrices of n x n values in [lo, hi).
attnfiqa::AttentionCapture random_capture(Rng& rng, std::size_t heads, std::size_t n, float lo = -3.0f,
                                          float hi = 3.0f);

/// Fresh empty directory under the system temp dir.
std::filesystem::path temp_dir(const std::string& tag);

std::string slurp(const std::filesystem::path& p);
void spit(const std::filesystem::path& p, const std::string& text);

}  // namespace testing
