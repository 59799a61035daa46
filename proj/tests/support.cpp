#include "support.hpp"

#include <fstream>
#include <sstream>
#include <unistd.h>

namespace testing {

using attnfiqa::Matrix;

Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, float lo, float hi) {
  std::uniform_real_distribution<float> dist(lo, hi);
  Matrix m(rows, cols);
  for (float& v : m.values()) v = dist(rng);
  return m;
}

std::vector<float> random_vector(Rng& rng, std::size_t n, float lo, float hi) {
  std::uniform_real_distribution<float> dist(lo, hi);
  std::vector<float> v(n);
  for (float& x : v) x = dist(rng);
  return v;
}

attnfiqa::ModelConfig toy_config(std::size_t blocks, std::size_t heads) {
  attnfiqa::ModelConfig cfg;
  cfg.image_height = 8;
  cfg.image_width = 8;
  cfg.patch_size = 2;
  cfg.embed_dim = 8;
  cfg.num_blocks = blocks;
  cfg.num_heads = heads;
  cfg.mlp_ratio = 2.0;
  cfg.validate();
  return cfg;
}

attnfiqa::WeightSet random_weights(Rng& rng, const attnfiqa::ModelConfig& cfg, float scale) {
  attnfiqa::WeightSet ws = attnfiqa::zero_weights(cfg);
  auto fill = [&](Matrix& m) { m = random_matrix(rng, m.rows(), m.cols(), -scale, scale); };
  auto fillv = [&](std::vector<float>& v, float lo, float hi) { v = random_vector(rng, v.size(), lo, hi); };
  fill(ws.patch_proj);
  fillv(ws.patch_bias, -scale, scale);
  fill(ws.pos_embed);
  for (auto& b : ws.blocks) {
    fillv(b.ln1_gamma, 0.8f, 1.2f);
    fillv(b.ln1_beta, -0.1f, 0.1f);
    fill(b.wq);
    fill(b.wk);
    fill(b.wv);
    fill(b.wo);
    fillv(b.ln2_gamma, 0.8f, 1.2f);
    fillv(b.ln2_beta, -0.1f, 0.1f);
    fill(b.fc1);
    fillv(b.fc1_bias, -scale, scale);
    fill(b.fc2);
    fillv(b.fc2_bias, -scale, scale);
  }
  return ws;
}

attnfiqa::Raster random_raster(Rng& rng, std::size_t w, std::size_t h) {
  std::uniform_int_distribution<int> dist(0, 255);
  attnfiqa::Raster r(w, h);
  for (auto& v : r.rgb) v = static_cast<std::uint8_t>(dist(rng));
  return r;
}

attnfiqa::Raster constant_raster(std::size_t w, std::size_t h, std::uint8_t v) {
  attnfiqa::Raster r(w, h);
  std::fill(r.rgb.begin(), r.rgb.end(), v);
  return r;
}

attnfiqa::AttentionCapture random_capture(Rng& rng, std::size_t heads, std::size_t n, float lo, float hi) {
  attnfiqa::AttentionCapture cap;
  cap.block = 1;
  for (std::size_t h = 0; h < heads; ++h) cap.heads.push_back(random_matrix(rng, n, n, lo, hi));
  return cap;
}

namespace {

// Removes every directory handed out by temp_dir when the process exits.
struct TempRegistry {
  std::vector<std::filesystem::path> dirs;
  ~TempRegistry() {
    std::error_code ec;
    for (const auto& d : dirs) std::filesystem::remove_all(d, ec);
  }
};

}  // namespace

std::filesystem::path temp_dir(const std::string& tag) {
  static int counter = 0;
  static TempRegistry registry;
  auto dir = std::filesystem::temp_directory_path() /
             ("attnfiqa_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  registry.dirs.push_back(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

}  // namespace testing
