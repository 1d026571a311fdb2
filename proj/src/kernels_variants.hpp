#pragma once
// Internal registry hooks for the SIMD kernel variants. Each returns
// nullptr when the variant is compiled out or unsupported by the host.

#include "qlcause/kernels.hpp"

namespace qlcause::kernels::detail {

const Ops* avx2_ops();
const Ops* neon_ops();

} // namespace qlcause::kernels::detail
