#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace attnfiqa::detail {

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);
std::string format_float(float v);

}  // namespace attnfiqa::detail
