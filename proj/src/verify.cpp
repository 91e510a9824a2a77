// Copyright (C) 2026 The ifa authors
// SPDX-License-Identifier: Apache-2.0
//
#include "ifa/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "ifa/fp8.hpp"
#include "ifa/generate.hpp"
#include "ifa/gemm.hpp"
#include "ifa/oracles.hpp"
#include "ifa/quant.hpp"

namespace ifa {

namespace {

struct Rng {
    std::mt19937_64 eng;

    explicit Rng(uint64_t seed) : eng(seed) {}

    int64_t pick(int64_t lo, int64_t hi) {
        return lo + static_cast<int64_t>(eng() % static_cast<uint64_t>(hi - lo + 1));
    }

    Int8Matrix codes(int64_t rows, int64_t cols) {
        Int8Matrix m(rows, cols);
        for (int64_t i = 0; i < m.size(); ++i) {
            m.data()[i] = static_cast<int8_t>(pick(-127, 127));
        }
        return m;
    }

    uint64_t sub_seed() { return eng(); }
};

double max_abs_diff(const FloatMatrix& a, const FloatMatrix& b) {
    double worst = 0.0;
    for (int64_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::fabs(static_cast<double>(a.data()[i]) -
                                          static_cast<double>(b.data()[i])));
    }
    return worst;
}

std::string describe_diff(const char* what, double diff, double bound) {
    std::ostringstream os;
    os << what << ": max |delta| " << diff << " exceeds " << bound;
    return os.str();
}

int32_t max_abs_code(const Int8Matrix& m) {
    int32_t worst = 0;
    for (int64_t i = 0; i < m.size(); ++i) {
        worst = std::max(worst, std::abs(static_cast<int32_t>(m.data()[i])));
    }
    return worst;
}

// Tolerance for tiled-vs-untiled integer attention: early blocks round P
// against a provisional maximum, which can shift each code by at most 2.
float relaxed_int8_bound(const QuantizedAttentionInputs& inputs) {
    return 2.0f / 127.0f * static_cast<float>(max_abs_code(inputs.v.values)) *
           inputs.v.scale;
}

QuantizedAttentionInputs random_quantized_inputs(int64_t n, int64_t d,
                                                 Rng& rng) {
    const FloatMatrix q = generate(ActivationSpec::normal(0.0, 1.0, rng.sub_seed()), n, d);
    const FloatMatrix k = generate(ActivationSpec::normal(0.0, 1.0, rng.sub_seed()), n, d);
    const FloatMatrix v = generate(ActivationSpec::normal(0.0, 1.0, rng.sub_seed()), n, d);
    return QuantizedAttentionInputs{quantize_per_row(q), quantize_per_row(k),
                                    quantize_per_tensor(v)};
}

std::string suite_int_gemm_oracle(const VerifyOptions& options,
                                  const IntFlashFn&) {
    Rng rng(options.seed ^ 0xa11ce5u);
    for (int c = 0; c < 60; ++c) {
        const int64_t m = rng.pick(1, 97);
        const int64_t n = rng.pick(1, 97);
        const int64_t k = rng.pick(1, 97);
        const Int8Matrix a = rng.codes(m, k);
        const Int8Matrix bt = rng.codes(n, k);
        if (!(int_gemm_nt(a, bt) == oracle_int_gemm_nt(a, bt))) {
            return "int_gemm_nt differs from the brute-force oracle at case " +
                   std::to_string(c);
        }
        const Int8Matrix b = rng.codes(k, n);
        if (!(int_gemm_nn(a, b) == oracle_int_gemm_nn(a, b))) {
            return "int_gemm_nn differs from the brute-force oracle at case " +
                   std::to_string(c);
        }
    }
    return "";
}

std::string suite_int_gemm_tiling(const VerifyOptions& options,
                                  const IntFlashFn&) {
    Rng rng(options.seed ^ 0x711e5u);
    for (int c = 0; c < 20; ++c) {
        const int64_t m = rng.pick(1, 80);
        const int64_t n = rng.pick(1, 80);
        const int64_t k = rng.pick(1, 32);
        const Int8Matrix a = rng.codes(m, k);
        const Int8Matrix b = rng.codes(n, k);
        const BlockSpec blocks{rng.pick(1, m + 8), rng.pick(1, n + 8)};
        if (!(int_gemm_nt_tiled(a, b, blocks) == int_gemm_nt(a, b))) {
            return "tiled integer gemm differs from untiled at case " +
                   std::to_string(c);
        }
    }
    return "";
}

std::string suite_scaling_linearity(const VerifyOptions& options,
                                    const IntFlashFn&) {
    Rng rng(options.seed ^ 0x5ca1eu);
    for (int c = 0; c < 30; ++c) {
        const int64_t m = rng.pick(1, 48);
        const int64_t n = rng.pick(1, 48);
        const int64_t d = rng.pick(1, 256);
        const QuantizedRows q = quantize_per_row(
            generate(ActivationSpec::normal(0.0, 1.0, rng.sub_seed()), m, d));
        const QuantizedRows k = quantize_per_row(
            generate(ActivationSpec::normal(0.0, 1.0, rng.sub_seed()), n, d));
        const Int32Matrix raw = int_gemm_nt(q.values, k.values);
        FloatMatrix lhs(m, n);
        for (int64_t i = 0; i < m; ++i) {
            for (int64_t j = 0; j < n; ++j) {
                lhs(i, j) = static_cast<float>(raw(i, j)) * (q.scales[i] * k.scales[j]);
            }
        }
        const FloatMatrix rhs =
            float_gemm(dequantize_rows(q), dequantize_rows(k), true);
        const double diff = max_abs_diff(lhs, rhs);
        if (diff > 1e-4) {
            return describe_diff("integer-then-scale vs dequantize-then-float",
                                 diff, 1e-4);
        }
    }
    return "";
}

std::string suite_float_flash_vs_reference(const VerifyOptions& options,
                                           const IntFlashFn&) {
    Rng rng(options.seed ^ 0xf1a5u);
    for (int c = 0; c < 40; ++c) {
        const int64_t n = rng.pick(1, 96);
        const int64_t d = rng.pick(1, 32);
        const FloatMatrix q = generate(ActivationSpec::normal(0.0, 1.0, rng.sub_seed()), n, d);
        const FloatMatrix k = generate(ActivationSpec::normal(0.0, 1.0, rng.sub_seed()), n, d);
        const FloatMatrix v = generate(ActivationSpec::normal(0.0, 1.0, rng.sub_seed()), n, d);
        AttentionConfig cfg;
        cfg.blocks = BlockSpec{rng.pick(1, n + 3), rng.pick(1, n + 3)};
        const double diff = max_abs_diff(flash_attention_float(q, k, v, cfg),
                                         reference_attention(q, k, v, cfg));
        if (diff > 1e-4) {
            return describe_diff("flash_attention_float vs reference", diff, 1e-4);
        }
    }
    return "";
}

std::string suite_tiling_invariance(const VerifyOptions& options,
                                    const IntFlashFn& int_flash) {
    Rng rng(options.seed ^ 0x7111u);
    const int64_t n = 24;
    const int64_t d = 8;
    const FloatMatrix q = generate(ActivationSpec::normal(0.0, 1.0, rng.sub_seed()), n, d);
    const FloatMatrix k = generate(ActivationSpec::normal(0.0, 1.0, rng.sub_seed()), n, d);
    const FloatMatrix v = generate(ActivationSpec::normal(0.0, 1.0, rng.sub_seed()), n, d);
    const QuantizedAttentionInputs qin{quantize_per_row(q), quantize_per_row(k),
                                       quantize_per_tensor(v)};
    const std::vector<BlockSpec> specs{{1, 1}, {2, 3}, {8, 8}};
    AttentionConfig whole;
    whole.blocks = BlockSpec{n, n};

    const FloatMatrix base_float = flash_attention_float(q, k, v, whole);
    const FloatMatrix base_fp8 = fp8_emulated_attention(q, k, v, whole);
    const FloatMatrix base_half = half_int8_attention(qin.q, qin.k, v, whole);
    const FloatMatrix base_full = int_flash(qin, whole, nullptr);
    const float int8_bound = relaxed_int8_bound(qin);

    for (const BlockSpec& blocks : specs) {
        AttentionConfig cfg;
        cfg.blocks = blocks;
        double diff = max_abs_diff(flash_attention_float(q, k, v, cfg), base_float);
        if (diff > 1e-5) {
            return describe_diff("float tiling invariance", diff, 1e-5);
        }
        diff = max_abs_diff(fp8_emulated_attention(q, k, v, cfg), base_fp8);
        if (diff > 1e-5) {
            return describe_diff("fp8 tiling invariance", diff, 1e-5);
        }
        diff = max_abs_diff(half_int8_attention(qin.q, qin.k, v, cfg), base_half);
        if (diff > 1e-5) {
            return describe_diff("half-int8 tiling invariance", diff, 1e-5);
        }
        diff = max_abs_diff(int_flash(qin, cfg, nullptr), base_full);
        if (diff > int8_bound) {
            return describe_diff("full-int8 tiling invariance", diff, int8_bound);
        }
    }
    return "";
}

std::string suite_quantized_oracle(const VerifyOptions& options,
                                   const IntFlashFn& int_flash) {
    Rng rng(options.seed ^ 0x0aac1eu);
    for (const int64_t n : {int64_t{1}, int64_t{5}, int64_t{24}, int64_t{33}}) {
        for (const int64_t d : {int64_t{1}, int64_t{8}, int64_t{16}}) {
            const QuantizedAttentionInputs qin = random_quantized_inputs(n, d, rng);
            AttentionConfig cfg;
            const FloatMatrix expected = oracle_untiled_int8_attention(qin, cfg);
            // One column block: the running maximum is the true row maximum
            // from the start, so the kernel must agree exactly.
            cfg.blocks = BlockSpec{std::min(options.blocks.Br, n), n};
            if (!(int_flash(qin, cfg, nullptr) == expected)) {
                return "single-column-block kernel differs from the untiled "
                       "oracle at N=" + std::to_string(n) + " d=" + std::to_string(d);
            }
            cfg.blocks = BlockSpec{std::min(options.blocks.Br, n),
                                   std::max<int64_t>(1, n / 3)};
            const double diff = max_abs_diff(int_flash(qin, cfg, nullptr), expected);
            const float bound = relaxed_int8_bound(qin);
            if (diff > bound) {
                return describe_diff("multi-block kernel vs untiled oracle", diff,
                                     bound);
            }
        }
    }
    return "";
}

std::string suite_quant_round_trip(const VerifyOptions& options,
                                   const IntFlashFn&) {
    Rng rng(options.seed ^ 0x9a07u);
    for (int c = 0; c < 200; ++c) {
        const int64_t len = rng.pick(1, 64);
        FloatMatrix row(1, len);
        const FloatMatrix draw =
            generate(ActivationSpec::normal(0.0, 1.0, rng.sub_seed()), 1, len);
        const float magnitude = std::pow(10.0f, static_cast<float>(rng.pick(-3, 3)));
        for (int64_t i = 0; i < len; ++i) {
            row.data()[i] = draw.data()[i] * magnitude;
        }
        const QuantizedRows qr = quantize_per_row(row);
        const FloatMatrix back = dequantize_rows(qr);
        const float scale = qr.scales[0];
        int64_t arg_max = 0;
        for (int64_t i = 0; i < len; ++i) {
            if (std::fabs(row.data()[i]) > std::fabs(row.data()[arg_max])) {
                arg_max = i;
            }
            const double err = std::fabs(static_cast<double>(back.data()[i]) -
                                         static_cast<double>(row.data()[i]));
            if (err > 0.5 * static_cast<double>(scale) * (1.0 + 1e-5)) {
                return "round-trip error " + std::to_string(err) +
                       " exceeds scale/2 = " + std::to_string(0.5 * scale);
            }
        }
        // The extremum must carry code +-127 and reconstruct to the nearest
        // float of 127 * scale. That lands bitwise on the source whenever its
        // significand is <= 127/64; above that no float32 scale can hit every
        // source value, so the check relaxes to one ulp.
        const float x = row.data()[arg_max];
        if (std::abs(static_cast<int>(qr.values.data()[arg_max])) != kQuantMax) {
            return "extremum code is not +-127 at case " + std::to_string(c);
        }
        const float rebuilt = back.data()[arg_max];
        int unused_exp = 0;
        const float significand = 2.0f * std::fabs(std::frexp(x, &unused_exp));
        if (significand <= 127.0f / 64.0f) {
            if (rebuilt != x) {
                return "extremum element did not round-trip exactly at case " +
                       std::to_string(c);
            }
        } else if (rebuilt != x &&
                   rebuilt != std::nextafter(
                                  x, -std::numeric_limits<float>::infinity()) &&
                   rebuilt != std::nextafter(
                                  x, std::numeric_limits<float>::infinity())) {
            return "extremum element strayed past one ulp at case " +
                   std::to_string(c);
        }
    }
    FloatMatrix zeros(3, 4);
    const QuantizedRows qz = quantize_per_row(zeros);
    for (int64_t r = 0; r < 3; ++r) {
        if (qz.scales[r] != 0.0f) {
            return "all-zero row produced a nonzero scale";
        }
    }
    for (int64_t i = 0; i < qz.values.size(); ++i) {
        if (qz.values.data()[i] != 0) {
            return "all-zero row produced a nonzero code";
        }
    }
    return "";
}

std::string suite_fp8_bit_oracle(const VerifyOptions& options,
                                 const IntFlashFn&) {
    for (int code = 0; code < 256; ++code) {
        const auto byte = static_cast<uint8_t>(code);
        if ((byte & 0x7f) == 0x7f) {
            continue;  // NaN codes
        }
        const float value = e4m3_decode(byte);
        if (!std::isfinite(value)) {
            return "finite code decoded to a non-finite value";
        }
        const uint8_t back = e4m3_encode(value);
        // +0 and -0 share a value; every other code must survive.
        if (back != byte && value != 0.0f) {
            return "encode(decode()) changed code " + std::to_string(code) +
                   " to " + std::to_string(back);
        }
    }
    Rng rng(options.seed ^ 0xf8u);
    std::vector<float> samples{0.0f,    -0.0f,   448.0f,  -448.0f, 449.0f,
                               520.0f,  -1e9f,   1.0625f, 1.1875f, -1.0625f,
                               0.25f,   1e-9f,   -1e-9f,  0.0009765625f,
                               0.001953125f, 0.0029296875f};
    for (int c = 0; c < 2000; ++c) {
        const float mag = std::pow(10.0f, static_cast<float>(rng.pick(-4, 3)));
        const auto u = static_cast<double>(rng.eng()) / 1.8446744073709552e19;
        samples.push_back(static_cast<float>((u * 2.0 - 1.0) * mag));
    }
    for (const float x : samples) {
        const uint8_t got = e4m3_encode(x);
        const uint8_t want = oracle_e4m3_nearest(x);
        if (got != want) {
            std::ostringstream os;
            os << "encode(" << x << ") = " << static_cast<int>(got)
               << ", oracle says " << static_cast<int>(want);
            return os.str();
        }
        const float snapped = e4m3_quantize(x);
        if (e4m3_quantize(snapped) != snapped) {
            return "e4m3 quantization is not idempotent";
        }
    }
    return "";
}

std::string suite_p_code_range(const VerifyOptions& options,
                               const IntFlashFn& int_flash) {
    Rng rng(options.seed ^ 0x9c0deu);
    for (const int64_t n : {int64_t{7}, int64_t{40}}) {
        const QuantizedAttentionInputs qin = random_quantized_inputs(n, 8, rng);
        for (const BlockSpec& blocks :
             {options.blocks, BlockSpec{3, 5}, BlockSpec{n, n}}) {
            AttentionConfig cfg;
            cfg.blocks = blocks;
            PCodeAudit audit;
            int_flash(qin, cfg, &audit);
            if (audit.min_code < 0 || audit.max_code > 127) {
                return "attention-weight code outside [0,127]: saw [" +
                       std::to_string(audit.min_code) + ", " +
                       std::to_string(audit.max_code) + "]";
            }
            if (audit.max_code != 127) {
                return "no attention-weight code reached 127 (max " +
                       std::to_string(audit.max_code) + ")";
            }
            if (!audit.row_max_block_hits_127) {
                return "a row's maximal column block lacks a 127 code";
            }
        }
    }
    return "";
}

std::string suite_softmax_weight_sum(const VerifyOptions& options,
                                     const IntFlashFn&) {
    Rng rng(options.seed ^ 0x50f7u);
    const int64_t n = 40;
    const int64_t d = 16;
    const FloatMatrix q = generate(ActivationSpec::normal(0.0, 1.0, rng.sub_seed()), n, d);
    const FloatMatrix k = generate(ActivationSpec::normal(0.0, 1.0, rng.sub_seed()), n, d);
    FloatMatrix ones(n, 5);
    std::fill(ones.data(), ones.data() + ones.size(), 1.0f);
    AttentionConfig cfg;
    cfg.blocks = options.blocks;
    const FloatMatrix out = flash_attention_float(q, k, ones, cfg);
    for (int64_t i = 0; i < out.size(); ++i) {
        if (std::fabs(out.data()[i] - 1.0f) > 1e-5f) {
            return "softmax weights do not sum to 1: output entry " +
                   std::to_string(out.data()[i]);
        }
    }
    return "";
}

}  // namespace

bool VerifyOutcome::passed() const {
    return std::all_of(suites.begin(), suites.end(),
                       [](const SuiteResult& s) { return s.passed; });
}

std::string VerifyOutcome::first_failure() const {
    for (const SuiteResult& s : suites) {
        if (!s.passed) {
            return s.name;
        }
    }
    return "";
}

VerifyOutcome run_verification(const VerifyOptions& options) {
    options.blocks.validate();
    IntFlashFn kernel = options.int_flash;
    if (!kernel) {
        kernel = [](const QuantizedAttentionInputs& inputs,
                    const AttentionConfig& cfg, PCodeAudit* audit) {
            return int_flash_attention(inputs, cfg, audit);
        };
    }
    struct Entry {
        const char* name;
        std::string (*fn)(const VerifyOptions&, const IntFlashFn&);
    };
    const Entry entries[] = {
        {"int-gemm-oracle", suite_int_gemm_oracle},
        {"int-gemm-tiling", suite_int_gemm_tiling},
        {"scaling-linearity", suite_scaling_linearity},
        {"float-flash-vs-reference", suite_float_flash_vs_reference},
        {"tiling-invariance", suite_tiling_invariance},
        {"quantized-oracle", suite_quantized_oracle},
        {"quant-round-trip", suite_quant_round_trip},
        {"fp8-bit-oracle", suite_fp8_bit_oracle},
        {"p-code-range", suite_p_code_range},
        {"softmax-weight-sum", suite_softmax_weight_sum},
    };
    VerifyOutcome outcome;
    for (const Entry& e : entries) {
        std::string detail = e.fn(options, kernel);
        outcome.suites.push_back(
            SuiteResult{e.name, detail.empty(), std::move(detail)});
    }
    return outcome;
}

}  // namespace ifa
