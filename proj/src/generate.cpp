// Copyright (C) 2026 The ifa authors
// SPDX-License-Identifier: Apache-2.0
//
#include "ifa/generate.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace ifa {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Top 53 bits of a 64-bit draw, mapped to [0, 1).
inline double unit_double(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

}  // namespace

ActivationSpec ActivationSpec::normal(double mean, double stddev, uint64_t seed) {
    ActivationSpec spec{Dist::kNormal, mean, stddev, seed};
    spec.validate();
    return spec;
}

ActivationSpec ActivationSpec::uniform(double lo, double hi, uint64_t seed) {
    ActivationSpec spec{Dist::kUniform, lo, hi, seed};
    spec.validate();
    return spec;
}

void ActivationSpec::validate() const {
    if (dist == Dist::kNormal) {
        if (!(param_b > 0.0)) {
            throw std::invalid_argument("normal distribution requires stddev > 0");
        }
    } else {
        if (!(param_a < param_b)) {
            throw std::invalid_argument("uniform distribution requires lo < hi");
        }
    }
}

FloatMatrix generate(const ActivationSpec& spec, int64_t rows, int64_t cols) {
    spec.validate();
    if (rows < 1 || cols < 1) {
        throw std::invalid_argument("generate requires rows >= 1 and cols >= 1");
    }

    FloatMatrix out(rows, cols);
    std::mt19937_64 eng(spec.seed);
    float* dst = out.data();
    const int64_t n = rows * cols;

    if (spec.dist == ActivationSpec::Dist::kUniform) {
        const double lo = spec.param_a;
        const double range = spec.param_b - spec.param_a;
        for (int64_t i = 0; i < n; ++i) {
            dst[i] = static_cast<float>(lo + unit_double(eng) * range);
        }
    } else {
        const double mean = spec.param_a;
        const double stddev = spec.param_b;
        for (int64_t i = 0; i < n; i += 2) {
            const double u1 = 1.0 - unit_double(eng);  // (0,1]: keeps log finite
            const double u2 = unit_double(eng);
            const double r = std::sqrt(-2.0 * std::log(u1));
            dst[i] = static_cast<float>(mean + stddev * r * std::cos(kTwoPi * u2));
            if (i + 1 < n) {
                dst[i + 1] = static_cast<float>(mean + stddev * r * std::sin(kTwoPi * u2));
            }
        }
    }
    return out;
}

}  // namespace ifa
