// Copyright (C) 2026 The ifa authors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstdint>

#include "ifa/matrix.hpp"

namespace ifa {

/// Description of a random activation tensor: distribution, its parameters,
/// and the seed. Same spec + shape always reproduce the same matrix bit for
/// bit, on any platform (see generate() for the fixed algorithm).
struct ActivationSpec {
    enum class Dist : uint8_t { kNormal = 0, kUniform = 1 };

    Dist dist = Dist::kNormal;
    double param_a = 0.0;  // mean for kNormal, lower bound for kUniform
    double param_b = 1.0;  // stddev for kNormal, upper bound for kUniform
    uint64_t seed = 0;

    static ActivationSpec normal(double mean, double stddev, uint64_t seed);
    static ActivationSpec uniform(double lo, double hi, uint64_t seed);

    /// Throws std::invalid_argument for stddev <= 0 or lo >= hi.
    void validate() const;
};

/// Fills a rows x cols matrix with i.i.d. draws from the spec's distribution.
///
/// The generator is pinned so runs replay across machines:
///  - PRNG: std::mt19937_64 seeded with spec.seed (sequence fixed by the
///    C++ standard).
///  - Uniform doubles u in [0,1) take the top 53 bits of each 64-bit draw.
///  - kUniform emits lo + u * (hi - lo).
///  - kNormal uses the Box-Muller transform on pairs (u1, u2), u1 in (0,1]:
///    r = sqrt(-2 ln u1), then r*cos(2*pi*u2) followed by r*sin(2*pi*u2).
///    A trailing odd element discards the sine half.
/// Values are computed in double and stored as float, row-major.
FloatMatrix generate(const ActivationSpec& spec, int64_t rows, int64_t cols);

}  // namespace ifa
