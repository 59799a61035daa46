#include "attnfiqa/ppm.hpp"

#include <cctype>
#include <charconv>

#include "attnfiqa/error.hpp"
#include "io_util.hpp"

namespace attnfiqa {
namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::string_view bytes) : bytes_(bytes) {}

  std::size_t next_number() {
    skip_space_and_comments();
    std::size_t value = 0;
    const auto* begin = bytes_.data() + pos_;
    const auto* end = bytes_.data() + bytes_.size();
    const auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc{} || res.ptr == begin) throw FormatError("PPM: malformed header");
    pos_ += static_cast<std::size_t>(res.ptr - begin);
    return value;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t raster_start() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      throw FormatError("PPM: missing whitespace after maxval");
    }
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view bytes_;
  std::size_t pos_ = 2;
};

}  // namespace

Raster parse_ppm(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P') throw FormatError("not a PPM/PNM file");
  if (bytes[1] != '6') {
    throw FormatError(std::string("unsupported PNM variant P") + bytes[1] + " (only binary P6)");
  }
  HeaderReader hdr(bytes);
  const std::size_t width = hdr.next_number();
  const std::size_t height = hdr.next_number();
  const std::size_t maxval = hdr.next_number();
  if (width == 0 || height == 0) throw FormatError("PPM: zero dimension");
  if (maxval != 255) throw FormatError("PPM: only 8-bit (maxval 255) supported, got " + std::to_string(maxval));
  const std::size_t start = hdr.raster_start();
  const std::size_t need = width * height * 3;
  if (bytes.size() - start < need) throw FormatError("PPM: truncated pixel data");
  Raster img(width, height);
  const auto* src = reinterpret_cast<const std::uint8_t*>(bytes.data() + start);
  img.rgb.assign(src, src + need);
  return img;
}

Raster read_ppm(const std::filesystem::path& path) {
  try {
    return parse_ppm(detail::read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string encode_ppm(const Raster& img) {
  if (img.rgb.size() != img.width * img.height * 3) throw ShapeError("raster buffer size mismatch");
  std::string out = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(img.rgb.data()), img.rgb.size());
  return out;
}

void write_ppm(const Raster& img, const std::filesystem::path& path) {
  detail::write_file(path, encode_ppm(img));
}

}  // namespace attnfiqa
