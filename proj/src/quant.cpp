// Copyright (C) 2026 The ifa authors
// SPDX-License-Identifier: Apache-2.0
//
#include "ifa/quant.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ifa {

namespace {

void require_finite(const FloatMatrix& m, const char* what) {
    const float* p = m.data();
    for (int64_t i = 0, n = m.size(); i < n; ++i) {
        if (!std::isfinite(p[i])) {
            throw std::invalid_argument(std::string(what) + ": non-finite input at index " +
                                        std::to_string(i));
        }
    }
}

// std::round ties away from zero, the documented mode for integer codes.
inline int8_t quantize_one(float x, float scale) {
    if (scale == 0.0f) {
        return 0;
    }
    float q = std::round(x / scale);
    q = std::clamp(q, -127.0f, 127.0f);
    return static_cast<int8_t>(q);
}

float max_abs(const float* p, int64_t n) {
    float m = 0.0f;
    for (int64_t i = 0; i < n; ++i) {
        m = std::max(m, std::fabs(p[i]));
    }
    return m;
}

}  // namespace

QuantizedRows quantize_per_row(const FloatMatrix& m) {
    require_finite(m, "quantize_per_row");
    QuantizedRows out{Int8Matrix(m.rows(), m.cols()), ScaleVector(m.rows())};
    for (int64_t r = 0; r < m.rows(); ++r) {
        const float* src = m.row_ptr(r);
        const float scale = max_abs(src, m.cols()) / static_cast<float>(kQuantMax);
        out.scales[r] = scale;
        int8_t* dst = out.values.row_ptr(r);
        for (int64_t c = 0; c < m.cols(); ++c) {
            dst[c] = quantize_one(src[c], scale);
        }
    }
    return out;
}

QuantizedTensor quantize_per_tensor(const FloatMatrix& m) {
    require_finite(m, "quantize_per_tensor");
    QuantizedTensor out{Int8Matrix(m.rows(), m.cols()),
                        max_abs(m.data(), m.size()) / static_cast<float>(kQuantMax)};
    const float* src = m.data();
    int8_t* dst = out.values.data();
    for (int64_t i = 0, n = m.size(); i < n; ++i) {
        dst[i] = quantize_one(src[i], out.scale);
    }
    return out;
}

FloatMatrix dequantize_rows(const QuantizedRows& q) {
    if (q.scales.len() != q.values.rows()) {
        throw std::invalid_argument("dequantize_rows: scales length does not match rows");
    }
    FloatMatrix out(q.values.rows(), q.values.cols());
    for (int64_t r = 0; r < q.values.rows(); ++r) {
        const int8_t* src = q.values.row_ptr(r);
        // Double product, one rounding: the row extremum (code +-127, scale
        // rowmax/127) lands back on its source value.
        const double scale = q.scales[r];
        float* dst = out.row_ptr(r);
        for (int64_t c = 0; c < q.values.cols(); ++c) {
            dst[c] = static_cast<float>(static_cast<double>(src[c]) * scale);
        }
    }
    return out;
}

FloatMatrix dequantize_tensor(const QuantizedTensor& q) {
    FloatMatrix out(q.values.rows(), q.values.cols());
    const int8_t* src = q.values.data();
    const double scale = q.scale;
    float* dst = out.data();
    for (int64_t i = 0, n = q.values.size(); i < n; ++i) {
        dst[i] = static_cast<float>(static_cast<double>(src[i]) * scale);
    }
    return out;
}

}  // namespace ifa
