#pragma once

#include "vmfbs/kernels.hpp"

namespace vmfbs::kernels::detail {

extern const KernelTable kScalarTable;

#if defined(VMFBS_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif

}  // namespace vmfbs::kernels::detail
