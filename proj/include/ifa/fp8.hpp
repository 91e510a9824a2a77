// Copyright (C) 2026 The ifa authors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstdint>

#include "ifa/matrix.hpp"

namespace ifa {

/// Largest finite e4m3 magnitude (1 sign, 4 exponent, 3 mantissa bits, bias 7;
/// exponent 1111 with mantissa 111 is reserved for NaN).
inline constexpr float kE4m3Max = 448.0f;

/// Converts to the e4m3 bit pattern, round-to-nearest-even, saturating at
/// +-448. Subnormals (step 2^-9) are kept.
uint8_t e4m3_encode(float x);

float e4m3_decode(uint8_t bits);

/// Nearest representable e4m3 value of x: decode(encode(x)).
float e4m3_quantize(float x);

/// Per-tensor FP8 degradation: scale by s = 448 / max(|m|), snap every element
/// to the e4m3 grid, divide by s. All-zero input returns all zeros.
FloatMatrix fp8_e4m3_roundtrip(const FloatMatrix& m);

}  // namespace ifa
