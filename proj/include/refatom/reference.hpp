#pragma once

#include "refatom/matrix.hpp"

// Serial reference kernels. Kept deliberately naive and independent of the
// OpenMP paths in kernels.cpp; tests and the benchmark compare against them.

namespace refatom::ref {

num::Matrix matmul_naive(const num::Matrix& a, const num::Matrix& b);
num::Matrix softmax_rows_naive(const num::Matrix& a);
num::Matrix softmax_cols_naive(const num::Matrix& a);

}  // namespace refatom::ref
