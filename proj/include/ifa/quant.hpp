// Copyright (C) 2026 The ifa authors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstdint>

#include "ifa/matrix.hpp"

namespace ifa {

/// Symmetric signed 8-bit code ceiling. Codes live in [-kQuantMax, kQuantMax];
/// -128 is never produced.
inline constexpr int32_t kQuantMax = 127;

/// Token-level quantization: one scale per row, scales[i] = rowmax(|m[i,:]|) / 127.
struct QuantizedRows {
    Int8Matrix values;
    ScaleVector scales;  // len == values.rows()
};

/// Tensor-level quantization: a single scale = max(|m|) / 127.
struct QuantizedTensor {
    Int8Matrix values;
    float scale = 0.0f;
};

/// codes[i,j] = round_half_away_from_zero(m[i,j] / scales[i]); an all-zero row
/// gets scale 0 and all-zero codes. Rejects non-finite input.
QuantizedRows quantize_per_row(const FloatMatrix& m);

/// Same with one global scale for the whole matrix.
QuantizedTensor quantize_per_tensor(const FloatMatrix& m);

FloatMatrix dequantize_rows(const QuantizedRows& q);
FloatMatrix dequantize_tensor(const QuantizedTensor& q);

}  // namespace ifa
