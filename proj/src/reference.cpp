#include "refatom/reference.hpp"

#include <cmath>

namespace refatom::ref {

using num::Matrix;

Matrix matmul_naive(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows())
        throw num::ShapeError("matmul_naive: inner dimension mismatch " + a.shape_str() + " * " +
                              b.shape_str());
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
            c(i, j) = acc;
        }
    return c;
}

Matrix softmax_rows_naive(const Matrix& a) {
    Matrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double mx = a(i, 0);
        for (std::size_t j = 1; j < a.cols(); ++j)
            if (a(i, j) > mx) mx = a(i, j);
        double sum = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) sum += std::exp(a(i, j) - mx);
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = std::exp(a(i, j) - mx) / sum;
    }
    return c;
}

Matrix softmax_cols_naive(const Matrix& a) {
    Matrix c(a.rows(), a.cols());
    for (std::size_t j = 0; j < a.cols(); ++j) {
        double mx = a(0, j);
        for (std::size_t i = 1; i < a.rows(); ++i)
            if (a(i, j) > mx) mx = a(i, j);
        double sum = 0.0;
        for (std::size_t i = 0; i < a.rows(); ++i) sum += std::exp(a(i, j) - mx);
        for (std::size_t i = 0; i < a.rows(); ++i) c(i, j) = std::exp(a(i, j) - mx) / sum;
    }
    return c;
}

}  // namespace refatom::ref
