// Copyright (C) 2026 The ifa authors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstdint>
#include <vector>

#include "ifa/gemm.hpp"
#include "ifa/matrix.hpp"
#include "ifa/quant.hpp"

namespace ifa {

enum class AttentionVariant {
    kFloatReference,
    kFloatFlash,
    kFullInt8,
    kHalfInt8,
    kFp8Emulated,
};

struct AttentionConfig {
    BlockSpec blocks{};
    // Off by default: the score matrix is plain Q.K^T. Reproduction runs keep
    // it off; the flag exists for callers that want the scaled variant.
    bool apply_sqrt_d_scaling = false;
    AttentionVariant variant = AttentionVariant::kFloatFlash;

    void validate() const { blocks.validate(); }
};

/// Running per-row softmax statistics for one row-block: m is the running
/// maximum (init -inf), l the running normalizer (init 0), acc the
/// unnormalized output accumulator.
struct SoftmaxState {
    std::vector<float> row_max;
    std::vector<float> row_sum;
    FloatMatrix acc;
};

SoftmaxState make_softmax_state(int64_t rows, int64_t d);

/// Folds one score block and the matching V row-block into the state using
/// the online-softmax recurrence, in float throughout. Updates in place.
void merge_softmax_state(SoftmaxState& state, const FloatMatrix& s_block,
                         const FloatMatrix& v_block);

/// diag(l)^-1 . acc. Requires at least one merged block (l > 0).
FloatMatrix finalize_softmax_state(const SoftmaxState& state);

/// Exact untiled softmax(Q.K^T).V with 64-bit internal arithmetic; the ground
/// truth the tiled variants are measured against.
FloatMatrix reference_attention(const FloatMatrix& q, const FloatMatrix& k,
                                const FloatMatrix& v,
                                const AttentionConfig& cfg);

/// Block-tiled float attention built on merge_softmax_state.
FloatMatrix flash_attention_float(const FloatMatrix& q, const FloatMatrix& k,
                                  const FloatMatrix& v,
                                  const AttentionConfig& cfg);

struct QuantizedAttentionInputs {
    QuantizedRows q;
    QuantizedRows k;
    QuantizedTensor v;

    // All three tensors share N and d; per-row scale lengths match N.
    void validate() const;
};

/// Observations recorded by int_flash_attention when requested: the range of
/// emitted attention-weight codes, and whether every row saw a code of 127 in
/// a column block attaining its final row maximum.
struct PCodeAudit {
    int32_t min_code = 127;
    int32_t max_code = 0;
    bool row_max_block_hits_127 = true;
    int64_t rows_audited = 0;
};

/// Full-INT8 tiled attention: integer score GEMM scaled by the per-row Q/K
/// scales, attention weights requantized to int8 against the running row max,
/// integer P.V accumulation, final rescale by diag(l)^-1 and the V scale.
FloatMatrix int_flash_attention(const QuantizedAttentionInputs& inputs,
                                const AttentionConfig& cfg,
                                PCodeAudit* audit = nullptr);

/// Q and K quantized, V float: scores come from the integer GEMM but the
/// attention weights stay float, so only the score matrix carries
/// quantization error.
FloatMatrix half_int8_attention(const QuantizedRows& q, const QuantizedRows& k,
                                const FloatMatrix& v,
                                const AttentionConfig& cfg);

/// Float tiled attention over inputs degraded by an e4m3 round trip.
FloatMatrix fp8_emulated_attention(const FloatMatrix& q, const FloatMatrix& k,
                                   const FloatMatrix& v,
                                   const AttentionConfig& cfg);

}  // namespace ifa
