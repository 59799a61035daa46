#include "attnfiqa/config.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "attnfiqa/error.hpp"
#include "io_util.hpp"

namespace attnfiqa {
namespace {

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw FormatError("config key '" + std::string(key) + "': bad value '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

std::size_t ModelConfig::mlp_hidden() const {
  return static_cast<std::size_t>(std::llround(mlp_ratio * static_cast<double>(embed_dim)));
}

void ModelConfig::validate() const {
  auto fail = [](const std::string& what) { throw FormatError("invalid model config: " + what); };
  if (patch_size == 0) fail("patch_size must be positive");
  if (image_height == 0 || image_width == 0) fail("image size must be positive");
  if (image_height % patch_size != 0 || image_width % patch_size != 0) {
    fail("image size must be a multiple of patch_size");
  }
  if (num_heads == 0 || embed_dim == 0) fail("embed_dim and num_heads must be positive");
  if (embed_dim % num_heads != 0) fail("embed_dim must be divisible by num_heads");
  if (num_blocks < 1) fail("num_blocks must be >= 1");
  if (!(mlp_ratio > 0.0)) fail("mlp_ratio must be positive");
  const double hidden = mlp_ratio * static_cast<double>(embed_dim);
  if (std::abs(hidden - std::round(hidden)) > 1e-9) fail("mlp_ratio * embed_dim must be integral");
  if (!(ln_eps > 0.0f)) fail("ln_eps must be positive");
  if (!(pixel_std > 0.0f)) fail("pixel_std must be positive");
}

ModelConfig parse_config(std::string_view text) {
  ModelConfig cfg;
  std::map<std::string, std::string, std::less<>> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view l = line;
    if (const auto hash = l.find('#'); hash != std::string_view::npos) l = l.substr(0, hash);
    l = detail::trim(l);
    if (l.empty()) continue;
    const auto eq = l.find('=');
    if (eq == std::string_view::npos) {
      throw FormatError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(detail::trim(l.substr(0, eq)));
    const std::string_view value = detail::trim(l.substr(eq + 1));
    if (!seen.emplace(key, value).second) throw FormatError("config key '" + key + "' repeated");

    if (key == "image_height") cfg.image_height = parse_number<std::size_t>(key, value);
    else if (key == "image_width") cfg.image_width = parse_number<std::size_t>(key, value);
    else if (key == "patch_size") cfg.patch_size = parse_number<std::size_t>(key, value);
    else if (key == "embed_dim") cfg.embed_dim = parse_number<std::size_t>(key, value);
    else if (key == "num_blocks") cfg.num_blocks = parse_number<std::size_t>(key, value);
    else if (key == "num_heads") cfg.num_heads = parse_number<std::size_t>(key, value);
    else if (key == "mlp_ratio") cfg.mlp_ratio = parse_number<double>(key, value);
    else if (key == "ln_eps") cfg.ln_eps = parse_number<float>(key, value);
    else if (key == "pixel_mean") cfg.pixel_mean = parse_number<float>(key, value);
    else if (key == "pixel_std") cfg.pixel_std = parse_number<float>(key, value);
    else throw FormatError("unknown config key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

ModelConfig load_config(const std::filesystem::path& path) {
  return parse_config(detail::read_file(path));
}

std::string format_config(const ModelConfig& cfg) {
  std::ostringstream out;
  out << "image_height = " << cfg.image_height << '\n'
      << "image_width = " << cfg.image_width << '\n'
      << "patch_size = " << cfg.patch_size << '\n'
      << "embed_dim = " << cfg.embed_dim << '\n'
      << "num_blocks = " << cfg.num_blocks << '\n'
      << "num_heads = " << cfg.num_heads << '\n'
      << "mlp_ratio = " << detail::format_double(cfg.mlp_ratio) << '\n'
      << "ln_eps = " << detail::format_float(cfg.ln_eps) << '\n'
      << "pixel_mean = " << detail::format_float(cfg.pixel_mean) << '\n'
      << "pixel_std = " << detail::format_float(cfg.pixel_std) << '\n';
  return out.str();
}

void save_config(const ModelConfig& cfg, const std::filesystem::path& path) {
  detail::write_file(path, format_config(cfg));
}

}  // namespace attnfiqa
