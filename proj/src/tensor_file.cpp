#include "attnfiqa/tensor_file.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <set>

#include "attnfiqa/error.hpp"
#include "io_util.hpp"

namespace attnfiqa {
namespace {

constexpr std::size_t kMaxRank = 8;

template <typename T>
void put_le(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xffu));
  }
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T get_le(const char* what) {
    need(sizeof(T), what);
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(T);
    return static_cast<T>(v);
  }

  std::string_view take(std::size_t n, const char* what) {
    need(n, what);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  std::size_t pos() const { return pos_; }

 private:
  void need(std::size_t n, const char* what) {
    if (bytes_.size() - pos_ < n) {
      throw TruncatedFileError(std::string("AFQW container truncated while reading ") + what);
    }
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

float float_from_le(const char* p) {
  std::uint32_t bits = 0;
  for (std::size_t i = 0; i < 4; ++i) bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  return std::bit_cast<float>(bits);
}

}  // namespace

std::uint64_t NamedTensor::element_count() const {
  std::uint64_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string shape_string(std::span<const std::uint64_t> shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += " x ";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

std::uint64_t container_header_size(std::span<const NamedTensor> tensors) {
  std::uint64_t size = 4 + 4 + 4;
  for (const auto& t : tensors) size += 2 + t.name.size() + 1 + 8 * t.shape.size() + 8;
  return size;
}

std::string encode_tensor_file(std::span<const NamedTensor> tensors) {
  std::set<std::string_view> names;
  std::uint64_t payload = 0;
  for (const auto& t : tensors) {
    if (t.name.empty() || t.name.size() > 0xffff) throw FormatError("tensor name length out of range");
    if (!names.insert(t.name).second) throw FormatError("duplicate tensor name '" + t.name + "'");
    if (t.shape.size() > kMaxRank) throw FormatError("tensor '" + t.name + "' rank too large");
    if (t.element_count() != t.data.size()) {
      throw ShapeError("tensor '" + t.name + "' data length does not match shape " + shape_string(t.shape));
    }
    payload += 4 * t.data.size();
  }
  const std::uint64_t header = container_header_size(tensors);

  std::string out;
  out.reserve(header + payload);
  out.append(kContainerMagic, 4);
  put_le<std::uint32_t>(out, kContainerVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(tensors.size()));
  std::uint64_t offset = header;
  for (const auto& t : tensors) {
    put_le<std::uint16_t>(out, static_cast<std::uint16_t>(t.name.size()));
    out.append(t.name);
    put_le<std::uint8_t>(out, static_cast<std::uint8_t>(t.shape.size()));
    for (auto d : t.shape) put_le<std::uint64_t>(out, d);
    put_le<std::uint64_t>(out, offset);
    offset += 4 * t.data.size();
  }
  for (const auto& t : tensors) {
    for (float v : t.data) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
  }
  return out;
}

std::vector<NamedTensor> decode_tensor_file(std::string_view bytes) {
  const std::size_t magic_len = std::min<std::size_t>(bytes.size(), 4);
  if (std::memcmp(bytes.data(), kContainerMagic, magic_len) != 0) {
    throw BadMagicError("bad magic: not an AFQW container");
  }
  Reader rd(bytes);
  rd.take(4, "magic");
  const auto version = rd.get_le<std::uint32_t>("version");
  if (version != kContainerVersion) {
    throw VersionMismatchError("AFQW version " + std::to_string(version) + " unsupported (expected " +
                               std::to_string(kContainerVersion) + ")");
  }
  const auto count = rd.get_le<std::uint32_t>("tensor count");

  struct Entry {
    NamedTensor tensor;
    std::uint64_t offset;
  };
  std::vector<Entry> entries;
  std::set<std::string> names;
  for (std::uint32_t i = 0; i < count; ++i) {
    Entry e;
    const auto len = rd.get_le<std::uint16_t>("name length");
    e.tensor.name = std::string(rd.take(len, "tensor name"));
    if (!names.insert(e.tensor.name).second) {
      throw FormatError("duplicate tensor name '" + e.tensor.name + "'");
    }
    const auto rank = rd.get_le<std::uint8_t>("rank");
    if (rank > kMaxRank) throw FormatError("tensor '" + e.tensor.name + "' rank too large");
    for (std::uint8_t r = 0; r < rank; ++r) e.tensor.shape.push_back(rd.get_le<std::uint64_t>("dims"));
    e.offset = rd.get_le<std::uint64_t>("offset");
    entries.push_back(std::move(e));
  }
  const std::size_t header_end = rd.pos();

  std::vector<NamedTensor> out;
  out.reserve(entries.size());
  for (auto& e : entries) {
    const std::uint64_t n = e.tensor.element_count();
    if (n > bytes.size() / 4) {
      throw TruncatedFileError("AFQW container truncated: tensor '" + e.tensor.name + "' payload missing");
    }
    if (e.offset < header_end) {
      throw FormatError("tensor '" + e.tensor.name + "' payload offset overlaps the header");
    }
    if (e.offset > bytes.size() || bytes.size() - e.offset < 4 * n) {
      throw TruncatedFileError("AFQW container truncated: tensor '" + e.tensor.name + "' payload missing");
    }
    e.tensor.data.resize(n);
    const char* p = bytes.data() + e.offset;
    for (std::uint64_t k = 0; k < n; ++k) e.tensor.data[k] = float_from_le(p + 4 * k);
    out.push_back(std::move(e.tensor));
  }
  return out;
}

void write_tensor_file(const std::filesystem::path& path, std::span<const NamedTensor> tensors) {
  detail::write_file(path, encode_tensor_file(tensors));
}

std::vector<NamedTensor> read_tensor_file(const std::filesystem::path& path) {
  return decode_tensor_file(detail::read_file(path));
}

}  // namespace attnfiqa
