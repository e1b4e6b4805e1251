#pragma once

#include "refatom/matrix.hpp"

#include <functional>

// Forward-evaluation kernels. Inner loops are OpenMP-parallel over independent
// output rows; every output element is accumulated in the same sequential
// k-order as the serial reference, so results are bit-identical to it
// regardless of thread count.

namespace refatom::num {

enum class Axis { Rows, Cols };  // the axis along which softmax sums to 1

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
Matrix hadamard(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double c);

// a (N x d) plus bias row (1 x d), broadcast over rows.
Matrix add_row_broadcast(const Matrix& a, const Matrix& bias);

// Max-subtracted softmax. Axis::Rows: each row sums to 1; Axis::Cols: each
// column sums to 1.
Matrix softmax(const Matrix& a, Axis axis);

Matrix map_unary(const Matrix& a, const std::function<double(double)>& f);

double softplus(double x);
double logistic(double x);

}  // namespace refatom::num
