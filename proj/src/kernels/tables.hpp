#pragma once

#include "attnfiqa/kernels.hpp"

namespace attnfiqa::detail {

extern const KernelTable kScalarKernels;
#if defined(ATTNFIQA_HAVE_AVX2)
extern const KernelTable kAvx2Kernels;
#endif
#if defined(ATTNFIQA_HAVE_NEON)
extern const KernelTable kNeonKernels;
#endif

}  // namespace attnfiqa::detail
