#pragma once

#include <algorithm>
#include <cstdint>

#include "aoa/matrix.hpp"
#include "aoa/parallel.hpp"

namespace aoa::nn {

// Batch kernels behind the network engine. Every kernel parallelizes over
// output rows only and keeps the per-row accumulation order fixed, so the
// serial reference mode and the OpenMP mode produce bitwise identical
// results.

// c[m x n] = a[m x k] * b[k x n]
template <typename T>
void gemm(const Matrix<T>& a, const Matrix<T>& b, Matrix<T>& c) {
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    if (b.rows() != k) throw std::invalid_argument("gemm: inner dimensions differ");
    if (c.rows() != m || c.cols() != n) c = Matrix<T>(m, n);
    par::parallel_for(static_cast<std::int64_t>(m), [&](std::int64_t i) {
        T* __restrict crow = c.row(static_cast<std::size_t>(i));
        std::fill(crow, crow + n, T{});
        const T* __restrict arow = a.row(static_cast<std::size_t>(i));
        for (std::size_t p = 0; p < k; ++p) {
            const T av = arow[p];
            const T* __restrict brow = b.row(p);
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    });
}

// exact element moves, parallel over output rows
template <typename T>
void transpose(const Matrix<T>& a, Matrix<T>& at) {
    if (at.rows() != a.cols() || at.cols() != a.rows()) at = Matrix<T>(a.cols(), a.rows());
    par::parallel_for(static_cast<std::int64_t>(a.cols()), [&](std::int64_t j) {
        T* __restrict trow = at.row(static_cast<std::size_t>(j));
        for (std::size_t i = 0; i < a.rows(); ++i) trow[i] = a(i, static_cast<std::size_t>(j));
    });
}

// c[m x n] = a[m x k] * b[n x k]^T. Large batches materialize b^T and run
// the stride-friendly axpy kernel (the transpose moves bits, it never
// rounds); tiny batches skip the transpose and take unrolled dot products.
template <typename T>
void gemm_a_bt(const Matrix<T>& a, const Matrix<T>& b, Matrix<T>& c) {
    const std::size_t m = a.rows(), k = a.cols(), n = b.rows();
    if (b.cols() != k) throw std::invalid_argument("gemm_a_bt: inner dimensions differ");
    if (m >= 4) {
        Matrix<T> bt;
        transpose(b, bt);
        gemm(a, bt, c);
        return;
    }
    if (c.rows() != m || c.cols() != n) c = Matrix<T>(m, n);
    const std::size_t k8 = k - k % 8;
    par::parallel_for(static_cast<std::int64_t>(n), [&](std::int64_t j) {
        const T* __restrict brow = b.row(static_cast<std::size_t>(j));
        for (std::size_t i = 0; i < m; ++i) {
            const T* __restrict arow = a.row(i);
            T acc[8] = {};
            for (std::size_t p = 0; p < k8; p += 8)
                for (std::size_t u = 0; u < 8; ++u) acc[u] += arow[p + u] * brow[p + u];
            T tail{};
            for (std::size_t p = k8; p < k; ++p) tail += arow[p] * brow[p];
            c(i, static_cast<std::size_t>(j)) = ((acc[0] + acc[1]) + (acc[2] + acc[3])) +
                                                ((acc[4] + acc[5]) + (acc[6] + acc[7])) + tail;
        }
    });
}

// c[k x n] = a[m x k]^T * b[m x n]
template <typename T>
void gemm_at_b(const Matrix<T>& a, const Matrix<T>& b, Matrix<T>& c) {
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    if (b.rows() != m) throw std::invalid_argument("gemm_at_b: outer dimensions differ");
    if (c.rows() != k || c.cols() != n) c = Matrix<T>(k, n);
    par::parallel_for(static_cast<std::int64_t>(k), [&](std::int64_t r) {
        T* __restrict crow = c.row(static_cast<std::size_t>(r));
        std::fill(crow, crow + n, T{});
        for (std::size_t i = 0; i < m; ++i) {
            const T av = a(i, static_cast<std::size_t>(r));
            const T* __restrict brow = b.row(i);
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    });
}

// row-wise bias add
template <typename T>
void add_bias(Matrix<T>& x, const std::vector<T>& bias) {
    if (bias.size() != x.cols()) throw std::invalid_argument("bias size mismatch");
    par::parallel_for(static_cast<std::int64_t>(x.rows()), [&](std::int64_t i) {
        T* row = x.row(static_cast<std::size_t>(i));
        for (std::size_t j = 0; j < x.cols(); ++j) row[j] += bias[j];
    });
}

// column sums, used for bias gradients
template <typename T>
void column_sums(const Matrix<T>& x, std::vector<T>& out) {
    out.assign(x.cols(), T{});
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const T* row = x.row(i);
        for (std::size_t j = 0; j < x.cols(); ++j) out[j] += row[j];
    }
}

} // namespace aoa::nn
