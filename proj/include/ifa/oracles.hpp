// Copyright (C) 2026 The ifa authors
// SPDX-License-Identifier: Apache-2.0
//
// Independent reimplementations used only to check the production kernels:
// brute-force GEMMs with wide accumulators, an untiled integer attention
// that never merges running maxima, and a table-driven e4m3 rounder.
#pragma once

#include <cstdint>

#include "ifa/attention.hpp"
#include "ifa/matrix.hpp"

namespace ifa {

/// Brute-force a . b^T with 64-bit accumulation; throws std::overflow_error
/// if any element falls outside int32.
Int32Matrix oracle_int_gemm_nt(const Int8Matrix& a, const Int8Matrix& b);

/// Brute-force a . b, same contract.
Int32Matrix oracle_int_gemm_nn(const Int8Matrix& a, const Int8Matrix& b);

/// a . b (or a . b^T) with 64-bit accumulation, rounded to float at the end.
FloatMatrix oracle_float_gemm_f64(const FloatMatrix& a, const FloatMatrix& b,
                                  bool transpose_b);

/// Untiled integer attention: full score rows, the true row maximum, one
/// rounding of the weight codes, no online merging. Matches the tiled kernel
/// bit-for-bit when the kernel runs with Bc == N.
FloatMatrix oracle_untiled_int8_attention(const QuantizedAttentionInputs& inputs,
                                          const AttentionConfig& cfg);

/// Nearest e4m3 value by scanning all finite codes, ties to the even code,
/// magnitudes above 448 saturated. Independent of the production encoder.
uint8_t oracle_e4m3_nearest(float x);

}  // namespace ifa
