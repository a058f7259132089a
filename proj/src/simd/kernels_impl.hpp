#pragma once

#include "wallforge/kernels.hpp"

namespace wallforge::kernels {

#if defined(WALLFORGE_HAVE_AVX2)
/// Defined in kernels_avx2.cpp, the only translation unit built with -mavx2.
const KernelTable& avx2_table_unchecked();
#endif

}  // namespace wallforge::kernels
