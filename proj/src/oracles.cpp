// Copyright (C) 2026 The ifa authors
// SPDX-License-Identifier: Apache-2.0
//
#include "ifa/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace ifa {

namespace {

int32_t narrow32(int64_t v) {
    if (v < std::numeric_limits<int32_t>::min() ||
        v > std::numeric_limits<int32_t>::max()) {
        throw std::overflow_error("oracle gemm element " + std::to_string(v) +
                                  " does not fit int32");
    }
    return static_cast<int32_t>(v);
}

}  // namespace

Int32Matrix oracle_int_gemm_nt(const Int8Matrix& a, const Int8Matrix& b) {
    if (a.cols() != b.cols()) {
        throw std::invalid_argument("oracle_int_gemm_nt: inner dimensions differ");
    }
    Int32Matrix out(a.rows(), b.rows());
    for (int64_t i = 0; i < a.rows(); ++i) {
        for (int64_t j = 0; j < b.rows(); ++j) {
            int64_t acc = 0;
            for (int64_t t = 0; t < a.cols(); ++t) {
                acc += static_cast<int64_t>(a(i, t)) * static_cast<int64_t>(b(j, t));
            }
            out(i, j) = narrow32(acc);
        }
    }
    return out;
}

Int32Matrix oracle_int_gemm_nn(const Int8Matrix& a, const Int8Matrix& b) {
    if (a.cols() != b.rows()) {
        throw std::invalid_argument("oracle_int_gemm_nn: inner dimensions differ");
    }
    Int32Matrix out(a.rows(), b.cols());
    for (int64_t i = 0; i < a.rows(); ++i) {
        for (int64_t j = 0; j < b.cols(); ++j) {
            int64_t acc = 0;
            for (int64_t t = 0; t < a.cols(); ++t) {
                acc += static_cast<int64_t>(a(i, t)) * static_cast<int64_t>(b(t, j));
            }
            out(i, j) = narrow32(acc);
        }
    }
    return out;
}

FloatMatrix oracle_float_gemm_f64(const FloatMatrix& a, const FloatMatrix& b,
                                  bool transpose_b) {
    const int64_t k = a.cols();
    const int64_t n = transpose_b ? b.rows() : b.cols();
    if ((transpose_b ? b.cols() : b.rows()) != k) {
        throw std::invalid_argument("oracle_float_gemm_f64: inner dimensions differ");
    }
    FloatMatrix out(a.rows(), n);
    for (int64_t i = 0; i < a.rows(); ++i) {
        for (int64_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int64_t t = 0; t < k; ++t) {
                const float bv = transpose_b ? b(j, t) : b(t, j);
                acc += static_cast<double>(a(i, t)) * static_cast<double>(bv);
            }
            out(i, j) = static_cast<float>(acc);
        }
    }
    return out;
}

FloatMatrix oracle_untiled_int8_attention(const QuantizedAttentionInputs& inputs,
                                          const AttentionConfig& cfg) {
    inputs.validate();
    const int64_t n = inputs.q.values.rows();
    const int64_t d = inputs.q.values.cols();
    const float extra = cfg.apply_sqrt_d_scaling
                            ? 1.0f / std::sqrt(static_cast<float>(d))
                            : 1.0f;
    const float sv = inputs.v.scale;
    FloatMatrix out(n, d);
    std::vector<float> s(static_cast<size_t>(n));
    std::vector<int32_t> codes(static_cast<size_t>(n));
    for (int64_t i = 0; i < n; ++i) {
        const float sq = inputs.q.scales[i];
        for (int64_t c = 0; c < n; ++c) {
            int64_t acc = 0;
            for (int64_t t = 0; t < d; ++t) {
                acc += static_cast<int64_t>(inputs.q.values(i, t)) *
                       static_cast<int64_t>(inputs.k.values(c, t));
            }
            // Same float expression as the kernel's score pass.
            s[static_cast<size_t>(c)] = static_cast<float>(narrow32(acc)) *
                                        (sq * inputs.k.scales[c]);
        }
        if (extra != 1.0f) {
            for (int64_t c = 0; c < n; ++c) {
                s[static_cast<size_t>(c)] *= extra;
            }
        }
        float row_max = -std::numeric_limits<float>::infinity();
        for (int64_t c = 0; c < n; ++c) {
            row_max = std::max(row_max, s[static_cast<size_t>(c)]);
        }
        int32_t l = 0;
        for (int64_t c = 0; c < n; ++c) {
            const int32_t code = static_cast<int32_t>(
                std::round(127.0f * std::exp(s[static_cast<size_t>(c)] - row_max)));
            codes[static_cast<size_t>(c)] = code;
            l += code;
        }
        const float lf = static_cast<float>(l);
        for (int64_t col = 0; col < d; ++col) {
            int64_t acc = 0;
            for (int64_t c = 0; c < n; ++c) {
                acc += static_cast<int64_t>(codes[static_cast<size_t>(c)]) *
                       static_cast<int64_t>(inputs.v.values(c, col));
            }
            out(i, col) = (static_cast<float>(narrow32(acc)) / lf) * sv;
        }
    }
    return out;
}

uint8_t oracle_e4m3_nearest(float x) {
    if (std::isnan(x)) {
        return std::signbit(x) ? 0xff : 0x7f;
    }
    const uint8_t sign = std::signbit(x) ? 0x80 : 0x00;
    const double a = std::fabs(static_cast<double>(x));
    // Magnitudes of codes 0x00..0x7e, ascending: subnormals mant*2^-9, then
    // normals (8+mant)*2^(exp-10).
    static const std::vector<double> grid = [] {
        std::vector<double> g;
        for (int code = 0; code <= 0x7e; ++code) {
            const int exp_field = code >> 3;
            const int mant = code & 0x7;
            if (exp_field == 0) {
                g.push_back(std::ldexp(static_cast<double>(mant), -9));
            } else {
                g.push_back(std::ldexp(static_cast<double>(8 + mant), exp_field - 10));
            }
        }
        return g;
    }();
    if (a >= grid.back()) {
        return sign | 0x7e;
    }
    int lo = 0;
    while (grid[static_cast<size_t>(lo) + 1] <= a) {
        ++lo;
    }
    const double d_lo = a - grid[static_cast<size_t>(lo)];
    const double d_hi = grid[static_cast<size_t>(lo) + 1] - a;
    int pick;
    if (d_lo < d_hi) {
        pick = lo;
    } else if (d_hi < d_lo) {
        pick = lo + 1;
    } else {
        pick = (lo % 2 == 0) ? lo : lo + 1;
    }
    return sign | static_cast<uint8_t>(pick);
}

}  // namespace ifa
