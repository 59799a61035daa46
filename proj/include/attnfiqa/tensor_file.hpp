#pragma once

// The AFQW tensor container.
//
// All integers little-endian:
//   "AFQW"  u32 version (=1)  u32 tensor_count
//   per tensor: u16 name_len, name (UTF-8), u8 rank, u64 dims[rank], u64 offset
//   payload: float32 little-endian tensors, contiguous, in header order
// `offset` is the absolute byte position of the tensor's first float in the
// file. No padding, so file size == header size + sum of tensor byte lengths.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace attnfiqa {

inline constexpr char kContainerMagic[4] = {'A', 'F', 'Q', 'W'};
inline constexpr std::uint32_t kContainerVersion = 1;

struct NamedTensor {
  std::string name;
  std::vector<std::uint64_t> shape;
  std::vector<float> data;

  std::uint64_t element_count() const;
};

std::string shape_string(std::span<const std::uint64_t> shape);

/// Byte length of the header for the given tensors.
std::uint64_t container_header_size(std::span<const NamedTensor> tensors);

std::string encode_tensor_file(std::span<const NamedTensor> tensors);
std::vector<NamedTensor> decode_tensor_file(std::string_view bytes);

void write_tensor_file(const std::filesystem::path& path, std::span<const NamedTensor> tensors);
std::vector<NamedTensor> read_tensor_file(const std::filesystem::path& path);

}  // namespace attnfiqa
