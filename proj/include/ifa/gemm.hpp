// Copyright (C) 2026 The ifa authors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstdint>

#include "ifa/matrix.hpp"

namespace ifa {

// Tile sizes for the blocked loops. Partial edge blocks run at their true
// size; no padding values ever enter a reduction.
struct BlockSpec {
    int64_t Br = 64;
    int64_t Bc = 64;

    void validate() const;
};

// Largest reduction depth for which k * 127 * 127 staying below 2^31 holds.
inline constexpr int64_t kMaxIntGemmDepth = (int64_t{1} << 31) / (127 * 127);

// Throws std::overflow_error when a depth-k int8 product could exceed int32.
void check_int_gemm_depth(int64_t k);

// out = a . b^T for int8 inputs, exact 32-bit accumulation.
Int32Matrix int_gemm_nt(const Int8Matrix& a, const Int8Matrix& b);

// out = a . b for int8 inputs, exact 32-bit accumulation.
Int32Matrix int_gemm_nn(const Int8Matrix& a, const Int8Matrix& b);

// Same product as int_gemm_nt, computed tile-by-tile. Bit-identical to the
// untiled kernel for every BlockSpec.
Int32Matrix int_gemm_nt_tiled(const Int8Matrix& a, const Int8Matrix& b,
                              BlockSpec blocks);

// out = a . b (or a . b^T), 32-bit float accumulation. Summation order is
// fixed (see gemm.cpp) so repeated runs agree bit-exactly.
FloatMatrix float_gemm(const FloatMatrix& a, const FloatMatrix& b,
                       bool transpose_b);

namespace detail {

// Strided kernels over row-major views; callers validate shapes and depth.
// Every output element accumulates its k terms in ascending order.

void int_gemm_nt_strided(const int8_t* a, int64_t lda, const int8_t* b,
                         int64_t ldb, int64_t m, int64_t n, int64_t k,
                         int32_t* out, int64_t ldo);

void int_gemm_nn_strided(const int8_t* a, int64_t lda, const int8_t* b,
                         int64_t ldb, int64_t m, int64_t n, int64_t k,
                         int32_t* out, int64_t ldo);

void float_gemm_nt_strided(const float* a, int64_t lda, const float* b,
                           int64_t ldb, int64_t m, int64_t n, int64_t k,
                           float* out, int64_t ldo);

// Accumulating form: out += a . b.
void float_gemm_nn_acc_strided(const float* a, int64_t lda, const float* b,
                               int64_t ldb, int64_t m, int64_t n, int64_t k,
                               float* out, int64_t ldo);

}  // namespace detail

}  // namespace ifa
