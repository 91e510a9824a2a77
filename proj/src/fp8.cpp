// Copyright (C) 2026 The ifa authors
// SPDX-License-Identifier: Apache-2.0
//
#include "ifa/fp8.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ifa {

namespace {

// Exact for our use: v is a float magnitude divided by a power of two, so the
// double quotient carries no rounding and ties are detected exactly.
int64_t round_ties_even(double v) {
    const double fl = std::floor(v);
    const double diff = v - fl;
    const int64_t n = static_cast<int64_t>(fl);
    if (diff > 0.5) return n + 1;
    if (diff < 0.5) return n;
    return (n % 2 == 0) ? n : n + 1;
}

}  // namespace

uint8_t e4m3_encode(float x) {
    const uint8_t sign = std::signbit(x) ? 0x80 : 0x00;
    if (std::isnan(x)) {
        return sign | 0x7f;
    }
    const double a = std::fabs(static_cast<double>(x));
    if (a == 0.0) {
        return sign;
    }
    if (a > static_cast<double>(kE4m3Max)) {
        return sign | 0x7e;  // saturate
    }

    int e = std::ilogb(a);
    if (e < -6) {
        e = -6;  // subnormal range shares the 2^-9 step
    }
    int64_t q = round_ties_even(std::ldexp(a, -(e - 3)));
    if (e == -6 && q < 8) {
        // subnormal: exponent field 0, value q * 2^-9
        return sign | static_cast<uint8_t>(q);
    }
    if (q == 16) {  // mantissa rounded past the binade
        e += 1;
        q = 8;
    }
    const uint8_t exp_field = static_cast<uint8_t>(e + 7);
    const uint8_t mant = static_cast<uint8_t>(q - 8);
    return sign | static_cast<uint8_t>(exp_field << 3) | mant;
}

float e4m3_decode(uint8_t bits) {
    const int exp_field = (bits >> 3) & 0xf;
    const int mant = bits & 0x7;
    if (exp_field == 0xf && mant == 0x7) {
        return std::numeric_limits<float>::quiet_NaN();
    }
    double v;
    if (exp_field == 0) {
        v = std::ldexp(static_cast<double>(mant) / 8.0, -6);
    } else {
        v = std::ldexp(1.0 + static_cast<double>(mant) / 8.0, exp_field - 7);
    }
    return static_cast<float>((bits & 0x80) ? -v : v);
}

float e4m3_quantize(float x) {
    return e4m3_decode(e4m3_encode(x));
}

FloatMatrix fp8_e4m3_roundtrip(const FloatMatrix& m) {
    const float* src = m.data();
    float max_abs = 0.0f;
    for (int64_t i = 0, n = m.size(); i < n; ++i) {
        if (!std::isfinite(src[i])) {
            throw std::invalid_argument("fp8_e4m3_roundtrip: non-finite input");
        }
        max_abs = std::max(max_abs, std::fabs(src[i]));
    }
    FloatMatrix out(m.rows(), m.cols());
    if (max_abs == 0.0f) {
        return out;
    }
    const float s = kE4m3Max / max_abs;
    float* dst = out.data();
    for (int64_t i = 0, n = m.size(); i < n; ++i) {
        dst[i] = e4m3_quantize(src[i] * s) / s;
    }
    return out;
}

}  // namespace ifa
