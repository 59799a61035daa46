#include <cstdlib>
#include <string>

#include "attnfiqa/error.hpp"
#include "tables.hpp"

namespace attnfiqa {
namespace {

bool cpu_supports(Backend b) {
  switch (b) {
    case Backend::kScalar:
      return true;
    case Backend::kAvx2:
#if defined(ATTNFIQA_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Backend::kNeon:
#if defined(ATTNFIQA_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Backend choose_backend() {
  if (const char* env = std::getenv("ATTNFIQA_BACKEND"); env != nullptr && *env != '\0') {
    const std::string want(env);
    for (Backend b : available_backends()) {
      if (backend_name(b) == want) return b;
    }
    throw Error("ATTNFIQA_BACKEND=" + want + " is not available on this machine");
  }
  return available_backends().back();
}

}  // namespace

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::kScalar:
      return "scalar";
    case Backend::kAvx2:
      return "avx2";
    case Backend::kNeon:
      return "neon";
  }
  return "unknown";
}

std::vector<Backend> available_backends() {
  std::vector<Backend> out;
  for (Backend b : {Backend::kScalar, Backend::kAvx2, Backend::kNeon}) {
    if (cpu_supports(b)) out.push_back(b);
  }
  return out;
}

const KernelTable& kernels_for(Backend b) {
  if (!cpu_supports(b)) throw Error("kernel backend '" + std::string(backend_name(b)) + "' unavailable");
  switch (b) {
#if defined(ATTNFIQA_HAVE_AVX2)
    case Backend::kAvx2:
      return detail::kAvx2Kernels;
#endif
#if defined(ATTNFIQA_HAVE_NEON)
    case Backend::kNeon:
      return detail::kNeonKernels;
#endif
    default:
      return detail::kScalarKernels;
  }
}

Backend active_backend() {
  static const Backend chosen = choose_backend();
  return chosen;
}

}  // namespace attnfiqa
