#pragma once

#include <complex>
#include <span>

#include "ddfmcw/params.hpp"

namespace ddfmcw::dft {

enum class Sign { forward = -1, backward = 1 };

// Unnormalized in-place DFT of `howmany` sequences of length n.
// Element i of sequence b lives at data[b * dist + i * stride].
void transform(cplx* data, int n, int howmany, int stride, int dist, Sign sign);

inline void transform(std::span<cplx> v, Sign sign) {
  transform(v.data(), static_cast<int>(v.size()), 1, 1, 0, sign);
}

// X <- X F_N (unitary DFT along every row).
void rows_forward(CMat& X);
// X <- X F_N^H.
void rows_backward(CMat& X);
// Unitary DFT along every column.
void cols_forward(CMat& X);
void cols_backward(CMat& X);

}  // namespace ddfmcw::dft
