// Copyright (C) 2026 The ifa authors
// SPDX-License-Identifier: Apache-2.0
//
// Summation order, pinned for reproducibility:
//   - *_nt kernels compute each out[i,j] as a dot product with t ascending.
//   - *_nn kernels walk i, then t ascending, then j, accumulating into the
//     output row; each element still sees its k terms in ascending t order.
#include "ifa/gemm.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace ifa {

void BlockSpec::validate() const {
    if (Br < 1 || Bc < 1) {
        throw std::invalid_argument("BlockSpec: Br and Bc must be >= 1");
    }
}

void check_int_gemm_depth(int64_t k) {
    if (k > kMaxIntGemmDepth) {
        throw std::overflow_error(
            "int gemm depth " + std::to_string(k) + " exceeds " +
            std::to_string(kMaxIntGemmDepth) + "; int32 accumulation could overflow");
    }
}

namespace detail {

void int_gemm_nt_strided(const int8_t* a, int64_t lda, const int8_t* b,
                         int64_t ldb, int64_t m, int64_t n, int64_t k,
                         int32_t* out, int64_t ldo) {
    for (int64_t i = 0; i < m; ++i) {
        const int8_t* ai = a + i * lda;
        for (int64_t j = 0; j < n; ++j) {
            const int8_t* bj = b + j * ldb;
            int32_t acc = 0;
            for (int64_t t = 0; t < k; ++t) {
                acc += static_cast<int32_t>(ai[t]) * static_cast<int32_t>(bj[t]);
            }
            out[i * ldo + j] = acc;
        }
    }
}

void int_gemm_nn_strided(const int8_t* a, int64_t lda, const int8_t* b,
                         int64_t ldb, int64_t m, int64_t n, int64_t k,
                         int32_t* out, int64_t ldo) {
    for (int64_t i = 0; i < m; ++i) {
        int32_t* oi = out + i * ldo;
        std::fill(oi, oi + n, 0);
        const int8_t* ai = a + i * lda;
        for (int64_t t = 0; t < k; ++t) {
            const int32_t av = ai[t];
            const int8_t* bt = b + t * ldb;
            for (int64_t j = 0; j < n; ++j) {
                oi[j] += av * static_cast<int32_t>(bt[j]);
            }
        }
    }
}

void float_gemm_nt_strided(const float* a, int64_t lda, const float* b,
                           int64_t ldb, int64_t m, int64_t n, int64_t k,
                           float* out, int64_t ldo) {
    for (int64_t i = 0; i < m; ++i) {
        const float* ai = a + i * lda;
        for (int64_t j = 0; j < n; ++j) {
            const float* bj = b + j * ldb;
            float acc = 0.0f;
            for (int64_t t = 0; t < k; ++t) {
                acc += ai[t] * bj[t];
            }
            out[i * ldo + j] = acc;
        }
    }
}

void float_gemm_nn_acc_strided(const float* a, int64_t lda, const float* b,
                               int64_t ldb, int64_t m, int64_t n, int64_t k,
                               float* out, int64_t ldo) {
    for (int64_t i = 0; i < m; ++i) {
        float* oi = out + i * ldo;
        const float* ai = a + i * lda;
        for (int64_t t = 0; t < k; ++t) {
            const float av = ai[t];
            const float* bt = b + t * ldb;
            for (int64_t j = 0; j < n; ++j) {
                oi[j] += av * bt[j];
            }
        }
    }
}

}  // namespace detail

namespace {

void require_inner(int64_t lhs, int64_t rhs, const char* what) {
    if (lhs != rhs) {
        throw std::invalid_argument(std::string(what) + ": inner dimensions " +
                                    std::to_string(lhs) + " and " +
                                    std::to_string(rhs) + " do not agree");
    }
}

}  // namespace

Int32Matrix int_gemm_nt(const Int8Matrix& a, const Int8Matrix& b) {
    require_inner(a.cols(), b.cols(), "int_gemm_nt");
    check_int_gemm_depth(a.cols());
    Int32Matrix out(a.rows(), b.rows());
    detail::int_gemm_nt_strided(a.data(), a.cols(), b.data(), b.cols(),
                                a.rows(), b.rows(), a.cols(), out.data(),
                                out.cols());
    return out;
}

Int32Matrix int_gemm_nn(const Int8Matrix& a, const Int8Matrix& b) {
    require_inner(a.cols(), b.rows(), "int_gemm_nn");
    check_int_gemm_depth(a.cols());
    Int32Matrix out(a.rows(), b.cols());
    detail::int_gemm_nn_strided(a.data(), a.cols(), b.data(), b.cols(),
                                a.rows(), b.cols(), a.cols(), out.data(),
                                out.cols());
    return out;
}

Int32Matrix int_gemm_nt_tiled(const Int8Matrix& a, const Int8Matrix& b,
                              BlockSpec blocks) {
    blocks.validate();
    require_inner(a.cols(), b.cols(), "int_gemm_nt_tiled");
    check_int_gemm_depth(a.cols());
    Int32Matrix out(a.rows(), b.rows());
    for (int64_t i0 = 0; i0 < a.rows(); i0 += blocks.Br) {
        const int64_t mb = std::min(blocks.Br, a.rows() - i0);
        for (int64_t j0 = 0; j0 < b.rows(); j0 += blocks.Bc) {
            const int64_t nb = std::min(blocks.Bc, b.rows() - j0);
            detail::int_gemm_nt_strided(a.row_ptr(i0), a.cols(), b.row_ptr(j0),
                                        b.cols(), mb, nb, a.cols(),
                                        out.data() + i0 * out.cols() + j0,
                                        out.cols());
        }
    }
    return out;
}

FloatMatrix float_gemm(const FloatMatrix& a, const FloatMatrix& b,
                       bool transpose_b) {
    if (transpose_b) {
        require_inner(a.cols(), b.cols(), "float_gemm");
        FloatMatrix out(a.rows(), b.rows());
        detail::float_gemm_nt_strided(a.data(), a.cols(), b.data(), b.cols(),
                                      a.rows(), b.rows(), a.cols(), out.data(),
                                      out.cols());
        return out;
    }
    require_inner(a.cols(), b.rows(), "float_gemm");
    FloatMatrix out(a.rows(), b.cols());  // zero-filled, kernel accumulates
    detail::float_gemm_nn_acc_strided(a.data(), a.cols(), b.data(), b.cols(),
                                      a.rows(), b.cols(), a.cols(), out.data(),
                                      out.cols());
    return out;
}

}  // namespace ifa
