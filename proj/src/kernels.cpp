#include "refatom/kernels.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace refatom::num {

namespace {
// Parallelism only pays off once a matrix op carries real work; tiny training
// shapes stay serial.
constexpr std::size_t kParallelFlops = 1u << 16;
}  // namespace

bool all_finite(const Matrix& m) {
    for (double v : m.vec())
        if (!std::isfinite(v)) return false;
    return true;
}

void require_finite(const Matrix& m, const char* where) {
    if (!all_finite(m))
        throw std::runtime_error(std::string(where) + ": non-finite entries in " + m.shape_str());
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows())
        throw ShapeError("matmul: inner dimension mismatch " + a.shape_str() + " * " +
                         b.shape_str());
    const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
    Matrix c(n, m);
    const double* pa = a.data();
    const double* pb = b.data();
    double* pc = c.data();
    const bool par = n * k * m >= kParallelFlops;
    // i-k-j order: each c[i][j] accumulates its k-terms in ascending k, the
    // same order as the naive i-j-k reference, so the sums are bit-identical.
#pragma omp parallel for schedule(static) if (par)
    for (long long i = 0; i < (long long)n; ++i) {
        double* crow = pc + i * m;
        for (std::size_t kk = 0; kk < k; ++kk) {
            const double av = pa[i * k + kk];
            const double* brow = pb + kk * m;
            for (std::size_t j = 0; j < m; ++j) crow[j] += av * brow[j];
        }
    }
    return c;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

Matrix add(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "add");
    Matrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) c.vec()[i] = a.vec()[i] + b.vec()[i];
    return c;
}

Matrix sub(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "sub");
    Matrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) c.vec()[i] = a.vec()[i] - b.vec()[i];
    return c;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "hadamard");
    Matrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) c.vec()[i] = a.vec()[i] * b.vec()[i];
    return c;
}

Matrix scale(const Matrix& a, double s) {
    Matrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) c.vec()[i] = a.vec()[i] * s;
    return c;
}

Matrix add_row_broadcast(const Matrix& a, const Matrix& bias) {
    if (bias.rows() != 1 || bias.cols() != a.cols())
        throw ShapeError("add_row_broadcast: bias " + bias.shape_str() + " vs " + a.shape_str());
    Matrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) + bias(0, j);
    return c;
}

Matrix softmax(const Matrix& a, Axis axis) {
    Matrix c(a.rows(), a.cols());
    if (axis == Axis::Rows) {
        const bool par = a.size() >= kParallelFlops;
#pragma omp parallel for schedule(static) if (par)
        for (long long i = 0; i < (long long)a.rows(); ++i) {
            double mx = a(i, 0);
            for (std::size_t j = 1; j < a.cols(); ++j) mx = std::max(mx, a(i, j));
            double sum = 0.0;
            for (std::size_t j = 0; j < a.cols(); ++j) {
                const double e = std::exp(a(i, j) - mx);
                c(i, j) = e;
                sum += e;
            }
            for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) /= sum;
        }
    } else {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            double mx = a(0, j);
            for (std::size_t i = 1; i < a.rows(); ++i) mx = std::max(mx, a(i, j));
            double sum = 0.0;
            for (std::size_t i = 0; i < a.rows(); ++i) {
                const double e = std::exp(a(i, j) - mx);
                c(i, j) = e;
                sum += e;
            }
            for (std::size_t i = 0; i < a.rows(); ++i) c(i, j) /= sum;
        }
    }
    return c;
}

Matrix map_unary(const Matrix& a, const std::function<double(double)>& f) {
    Matrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) c.vec()[i] = f(a.vec()[i]);
    return c;
}

double softplus(double x) {
    // max(x,0) + log1p(exp(-|x|)) avoids overflow on either tail
    return std::max(x, 0.0) + std::log1p(std::exp(-std::fabs(x)));
}

double logistic(double x) {
    if (x >= 0.0) {
        const double e = std::exp(-x);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace refatom::num
