// Copyright (C) 2026 The ifa authors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ifa/attention.hpp"

namespace ifa {

using IntFlashFn = std::function<FloatMatrix(
    const QuantizedAttentionInputs&, const AttentionConfig&, PCodeAudit*)>;

struct VerifyOptions {
    BlockSpec blocks{};
    uint64_t seed = 0;
    // Integer kernel under test; empty runs the production kernel. The hook
    // exists so a deliberately broken kernel can demonstrate the suites bite.
    IntFlashFn int_flash;
};

struct SuiteResult {
    std::string name;
    bool passed = false;
    std::string detail;  // empty when passed
};

struct VerifyOutcome {
    std::vector<SuiteResult> suites;

    bool passed() const;
    /// Name of the first failing suite, empty when everything passed.
    std::string first_failure() const;
};

/// Runs every property suite (integer-GEMM oracle, tiling, scaling
/// linearity, float-vs-reference, quantized oracle, quantization round trip,
/// e4m3 bit oracle, softmax weight sum) and reports per-suite outcomes.
VerifyOutcome run_verification(const VerifyOptions& options);

}  // namespace ifa
