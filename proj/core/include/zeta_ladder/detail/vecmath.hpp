#pragma once

#include <cstddef>

namespace zeta_ladder::detail {

// Elementwise sin/cos over a block of angles, |x| < 2^40. Cody-Waite
// reduction with a three-part pi/2 split (27 bits each, exact products for
// quotients below 2^26) plus Taylor kernels on [-pi/4, pi/4]. Written
// branch-free so the compiler can vectorize; absolute error < 1e-15.
void block_sincos(const double* x, double* s, double* c, std::size_t n);

}  // namespace zeta_ladder::detail
