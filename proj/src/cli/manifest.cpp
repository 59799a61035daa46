#include <chrono>
#include <ctime>

#include "attnfiqa/cli.hpp"
#include "attnfiqa/kernels.hpp"
#include "io_util.hpp"

namespace attnfiqa::cli {
namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

void RunManifest::write(const fs::path& path) const {
  std::string text = "command=" + command + "\n";
  for (const auto& [k, v] : entries) text += k + "=" + v + "\n";
  text += "kernel_backend=" + std::string(backend_name(active_backend())) + "\n";
  text += "timestamp=" + utc_timestamp() + "\n";
  detail::write_file(path, text);
}

}  // namespace attnfiqa::cli
