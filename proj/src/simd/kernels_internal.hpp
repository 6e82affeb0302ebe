#pragma once

#include "bmland/simd/kernels.hpp"

namespace bmland::simd::detail {

// Defined in the per-ISA translation units; only referenced when compiled in.
extern const KernelTable kScalarTable;
extern const KernelTable kAvx2Table;
extern const KernelTable kNeonTable;

}  // namespace bmland::simd::detail
