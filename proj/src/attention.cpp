// Copyright (C) 2026 The ifa authors
// SPDX-License-Identifier: Apache-2.0
//
// All tiled paths share one skeleton: outer loop over Q row-blocks, inner
// loop over K/V column-blocks, with the online-softmax recurrence
//   m' = max(m, rowmax(S)),  l' = l*exp(m-m') + rowsum(P),
//   acc' = acc*exp(m-m') + P.V
// and a final diag(l)^-1 rescale. The integer path rounds P to int8 codes
// against the running max and carries the 1/127 weight scale inside l.
#include "ifa/attention.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ifa/fp8.hpp"

namespace ifa {

namespace {

constexpr float kNegInf = -std::numeric_limits<float>::infinity();

float score_scale(const AttentionConfig& cfg, int64_t d) {
    return cfg.apply_sqrt_d_scaling ? 1.0f / std::sqrt(static_cast<float>(d))
                                    : 1.0f;
}

void require_qkv(const FloatMatrix& q, const FloatMatrix& k,
                 const FloatMatrix& v, const char* what) {
    if (q.cols() != k.cols()) {
        throw std::invalid_argument(std::string(what) + ": q/k head dims " +
                                    std::to_string(q.cols()) + " and " +
                                    std::to_string(k.cols()) + " differ");
    }
    if (k.rows() != v.rows()) {
        throw std::invalid_argument(std::string(what) + ": k has " +
                                    std::to_string(k.rows()) + " rows but v has " +
                                    std::to_string(v.rows()));
    }
    if (q.rows() < 1 || q.cols() < 1 || v.cols() < 1) {
        throw std::invalid_argument(std::string(what) + ": empty input");
    }
}

// Shared tiling skeleton for the float-weight paths. fill_scores writes the
// Br x Bc score block for (i0, j0) into its FloatMatrix argument.
template <typename ScoreFn>
FloatMatrix tiled_float_attention(int64_t n_q, int64_t n_kv,
                                  const FloatMatrix& v,
                                  const AttentionConfig& cfg,
                                  ScoreFn&& fill_scores) {
    cfg.validate();
    const int64_t dv = v.cols();
    std::vector<FloatMatrix> v_blocks;
    for (int64_t j0 = 0; j0 < n_kv; j0 += cfg.blocks.Bc) {
        const int64_t bc = std::min(cfg.blocks.Bc, n_kv - j0);
        FloatMatrix vb(bc, dv);
        std::copy(v.row_ptr(j0), v.row_ptr(j0) + bc * dv, vb.data());
        v_blocks.push_back(std::move(vb));
    }
    FloatMatrix out(n_q, dv);
    for (int64_t i0 = 0; i0 < n_q; i0 += cfg.blocks.Br) {
        const int64_t br = std::min(cfg.blocks.Br, n_q - i0);
        SoftmaxState state = make_softmax_state(br, dv);
        int64_t jb = 0;
        for (int64_t j0 = 0; j0 < n_kv; j0 += cfg.blocks.Bc, ++jb) {
            const int64_t bc = v_blocks[static_cast<size_t>(jb)].rows();
            FloatMatrix s(br, bc);
            fill_scores(i0, br, j0, bc, s);
            merge_softmax_state(state, s, v_blocks[static_cast<size_t>(jb)]);
        }
        const FloatMatrix o = finalize_softmax_state(state);
        std::copy(o.data(), o.data() + br * dv, out.row_ptr(i0));
    }
    return out;
}

}  // namespace

SoftmaxState make_softmax_state(int64_t rows, int64_t d) {
    SoftmaxState state;
    state.row_max.assign(static_cast<size_t>(rows), kNegInf);
    state.row_sum.assign(static_cast<size_t>(rows), 0.0f);
    state.acc = FloatMatrix(rows, d);
    return state;
}

void merge_softmax_state(SoftmaxState& state, const FloatMatrix& s_block,
                         const FloatMatrix& v_block) {
    const int64_t br = s_block.rows();
    const int64_t bc = s_block.cols();
    const int64_t d = state.acc.cols();
    if (static_cast<int64_t>(state.row_max.size()) != br ||
        static_cast<int64_t>(state.row_sum.size()) != br ||
        state.acc.rows() != br) {
        throw std::invalid_argument("merge_softmax_state: state has " +
                                    std::to_string(state.acc.rows()) +
                                    " rows, score block has " + std::to_string(br));
    }
    if (v_block.rows() != bc || v_block.cols() != d) {
        throw std::invalid_argument("merge_softmax_state: v block " +
                                    std::to_string(v_block.rows()) + "x" +
                                    std::to_string(v_block.cols()) +
                                    " does not match scores/accumulator");
    }
    FloatMatrix p(br, bc);
    for (int64_t r = 0; r < br; ++r) {
        const float* srow = s_block.row_ptr(r);
        float m_loc = kNegInf;
        for (int64_t c = 0; c < bc; ++c) {
            m_loc = std::max(m_loc, srow[c]);
        }
        const float m_new = std::max(state.row_max[r], m_loc);
        const float alpha = std::exp(state.row_max[r] - m_new);
        float* prow = p.row_ptr(r);
        float row_sum = 0.0f;
        for (int64_t c = 0; c < bc; ++c) {
            const float e = std::exp(srow[c] - m_new);
            prow[c] = e;
            row_sum += e;
        }
        state.row_sum[r] = state.row_sum[r] * alpha + row_sum;
        float* arow = state.acc.row_ptr(r);
        for (int64_t c = 0; c < d; ++c) {
            arow[c] *= alpha;
        }
        state.row_max[r] = m_new;
    }
    detail::float_gemm_nn_acc_strided(p.data(), bc, v_block.data(), d, br, d,
                                      bc, state.acc.data(), d);
}

FloatMatrix finalize_softmax_state(const SoftmaxState& state) {
    const int64_t br = state.acc.rows();
    const int64_t d = state.acc.cols();
    FloatMatrix out(br, d);
    for (int64_t r = 0; r < br; ++r) {
        const float inv = 1.0f / state.row_sum[r];
        const float* arow = state.acc.row_ptr(r);
        float* orow = out.row_ptr(r);
        for (int64_t c = 0; c < d; ++c) {
            orow[c] = arow[c] * inv;
        }
    }
    return out;
}

FloatMatrix reference_attention(const FloatMatrix& q, const FloatMatrix& k,
                                const FloatMatrix& v,
                                const AttentionConfig& cfg) {
    require_qkv(q, k, v, "reference_attention");
    const int64_t n = q.rows();
    const int64_t m = k.rows();
    const int64_t d = q.cols();
    const int64_t dv = v.cols();
    const double scale =
        cfg.apply_sqrt_d_scaling ? 1.0 / std::sqrt(static_cast<double>(d)) : 1.0;
    FloatMatrix out(n, dv);
    std::vector<double> s(static_cast<size_t>(m));
    std::vector<double> acc(static_cast<size_t>(dv));
    for (int64_t i = 0; i < n; ++i) {
        const float* qi = q.row_ptr(i);
        double row_max = -std::numeric_limits<double>::infinity();
        for (int64_t j = 0; j < m; ++j) {
            const float* kj = k.row_ptr(j);
            double dot = 0.0;
            for (int64_t t = 0; t < d; ++t) {
                dot += static_cast<double>(qi[t]) * static_cast<double>(kj[t]);
            }
            s[static_cast<size_t>(j)] = dot * scale;
            row_max = std::max(row_max, s[static_cast<size_t>(j)]);
        }
        std::fill(acc.begin(), acc.end(), 0.0);
        double l = 0.0;
        for (int64_t j = 0; j < m; ++j) {
            const double w = std::exp(s[static_cast<size_t>(j)] - row_max);
            l += w;
            const float* vj = v.row_ptr(j);
            for (int64_t c = 0; c < dv; ++c) {
                acc[static_cast<size_t>(c)] += w * static_cast<double>(vj[c]);
            }
        }
        float* orow = out.row_ptr(i);
        for (int64_t c = 0; c < dv; ++c) {
            orow[c] = static_cast<float>(acc[static_cast<size_t>(c)] / l);
        }
    }
    return out;
}

FloatMatrix flash_attention_float(const FloatMatrix& q, const FloatMatrix& k,
                                  const FloatMatrix& v,
                                  const AttentionConfig& cfg) {
    require_qkv(q, k, v, "flash_attention_float");
    const int64_t d = q.cols();
    const float extra = score_scale(cfg, d);
    auto fill = [&](int64_t i0, int64_t br, int64_t j0, int64_t bc,
                    FloatMatrix& s) {
        detail::float_gemm_nt_strided(q.row_ptr(i0), d, k.row_ptr(j0), d, br,
                                      bc, d, s.data(), bc);
        if (extra != 1.0f) {
            for (int64_t idx = 0, e = br * bc; idx < e; ++idx) {
                s.data()[idx] *= extra;
            }
        }
    };
    return tiled_float_attention(q.rows(), k.rows(), v, cfg, fill);
}

void QuantizedAttentionInputs::validate() const {
    const int64_t n = q.values.rows();
    const int64_t d = q.values.cols();
    if (n < 1 || d < 1) {
        throw std::invalid_argument("quantized attention inputs: empty q");
    }
    if (k.values.rows() != n || k.values.cols() != d || v.values.rows() != n ||
        v.values.cols() != d) {
        throw std::invalid_argument(
            "quantized attention inputs: q, k, v must all be " +
            std::to_string(n) + "x" + std::to_string(d));
    }
    if (q.scales.len() != n || k.scales.len() != n) {
        throw std::invalid_argument(
            "quantized attention inputs: scale vectors must have length " +
            std::to_string(n));
    }
    if (!(v.scale >= 0.0f) || !std::isfinite(v.scale)) {
        throw std::invalid_argument("quantized attention inputs: bad v scale");
    }
}

FloatMatrix int_flash_attention(const QuantizedAttentionInputs& inputs,
                                const AttentionConfig& cfg, PCodeAudit* audit) {
    inputs.validate();
    cfg.validate();
    const int64_t n = inputs.q.values.rows();
    const int64_t d = inputs.q.values.cols();
    check_int_gemm_depth(d);
    check_int_gemm_depth(std::min(cfg.blocks.Bc, n));
    const Int8Matrix& qv = inputs.q.values;
    const Int8Matrix& kv = inputs.k.values;
    const Int8Matrix& vv = inputs.v.values;
    const float sv = inputs.v.scale;
    const float extra = score_scale(cfg, d);

    const int64_t br_max = std::min(cfg.blocks.Br, n);
    const int64_t bc_max = std::min(cfg.blocks.Bc, n);
    std::vector<int32_t> s_int(static_cast<size_t>(br_max * bc_max));
    std::vector<float> s(static_cast<size_t>(br_max * bc_max));
    std::vector<int8_t> p(static_cast<size_t>(br_max * bc_max));
    std::vector<int32_t> pv(static_cast<size_t>(br_max * d));
    std::vector<float> acc(static_cast<size_t>(br_max * d));
    std::vector<float> m(static_cast<size_t>(br_max));
    std::vector<float> l(static_cast<size_t>(br_max));
    std::vector<uint8_t> row_hit(static_cast<size_t>(br_max));

    if (audit != nullptr) {
        *audit = PCodeAudit{};
    }
    int32_t code_min = 127;
    int32_t code_max = 0;

    FloatMatrix out(n, d);
    for (int64_t i0 = 0; i0 < n; i0 += cfg.blocks.Br) {
        const int64_t br = std::min(cfg.blocks.Br, n - i0);
        std::fill(m.begin(), m.begin() + br, kNegInf);
        std::fill(l.begin(), l.begin() + br, 0.0f);
        std::fill(acc.begin(), acc.begin() + br * d, 0.0f);
        std::fill(row_hit.begin(), row_hit.begin() + br, uint8_t{0});
        for (int64_t j0 = 0; j0 < n; j0 += cfg.blocks.Bc) {
            const int64_t bc = std::min(cfg.blocks.Bc, n - j0);
            detail::int_gemm_nt_strided(qv.row_ptr(i0), d, kv.row_ptr(j0), d,
                                        br, bc, d, s_int.data(), bc);
            for (int64_t r = 0; r < br; ++r) {
                const float sq = inputs.q.scales[i0 + r];
                const int32_t* irow = s_int.data() + r * bc;
                float* srow = s.data() + r * bc;
                for (int64_t c = 0; c < bc; ++c) {
                    srow[c] = static_cast<float>(irow[c]) *
                              (sq * inputs.k.scales[j0 + c]);
                }
                if (extra != 1.0f) {
                    for (int64_t c = 0; c < bc; ++c) {
                        srow[c] *= extra;
                    }
                }
            }
            for (int64_t r = 0; r < br; ++r) {
                const float* srow = s.data() + r * bc;
                float m_loc = kNegInf;
                for (int64_t c = 0; c < bc; ++c) {
                    m_loc = std::max(m_loc, srow[c]);
                }
                const float m_new = std::max(m[static_cast<size_t>(r)], m_loc);
                const float alpha = std::exp(m[static_cast<size_t>(r)] - m_new);
                int8_t* prow = p.data() + r * bc;
                int32_t p_sum = 0;
                bool has_full = false;
                for (int64_t c = 0; c < bc; ++c) {
                    // exp(s - m_new) <= 1, so codes land in [0, 127] with the
                    // block's running maximum mapping to exactly 127.
                    const int32_t code = static_cast<int32_t>(
                        std::round(127.0f * std::exp(srow[c] - m_new)));
                    prow[c] = static_cast<int8_t>(code);
                    p_sum += code;
                    has_full = has_full || code == 127;
                    code_min = std::min(code_min, code);
                    code_max = std::max(code_max, code);
                }
                l[static_cast<size_t>(r)] =
                    l[static_cast<size_t>(r)] * alpha + static_cast<float>(p_sum);
                float* arow = acc.data() + r * d;
                for (int64_t c = 0; c < d; ++c) {
                    arow[c] *= alpha;
                }
                // Track whether a block attaining the running row max emitted
                // a 127 code; blocks that only tie the max extend the record.
                if (m_new > m[static_cast<size_t>(r)]) {
                    row_hit[static_cast<size_t>(r)] = has_full ? 1 : 0;
                } else if (m_loc == m_new && has_full) {
                    row_hit[static_cast<size_t>(r)] = 1;
                }
                m[static_cast<size_t>(r)] = m_new;
            }
            detail::int_gemm_nn_strided(p.data(), bc, vv.row_ptr(j0), d, br, d,
                                        bc, pv.data(), d);
            for (int64_t idx = 0, e = br * d; idx < e; ++idx) {
                acc[static_cast<size_t>(idx)] +=
                    static_cast<float>(pv[static_cast<size_t>(idx)]);
            }
        }
        for (int64_t r = 0; r < br; ++r) {
            const float* arow = acc.data() + r * d;
            float* orow = out.row_ptr(i0 + r);
            const float lr = l[static_cast<size_t>(r)];
            for (int64_t c = 0; c < d; ++c) {
                orow[c] = (arow[c] / lr) * sv;
            }
        }
        if (audit != nullptr) {
            audit->rows_audited += br;
            for (int64_t r = 0; r < br; ++r) {
                audit->row_max_block_hits_127 =
                    audit->row_max_block_hits_127 &&
                    row_hit[static_cast<size_t>(r)] != 0;
            }
        }
    }
    if (audit != nullptr) {
        audit->min_code = code_min;
        audit->max_code = code_max;
    }
    return out;
}

FloatMatrix half_int8_attention(const QuantizedRows& q, const QuantizedRows& k,
                                const FloatMatrix& v,
                                const AttentionConfig& cfg) {
    const int64_t d = q.values.cols();
    if (k.values.cols() != d) {
        throw std::invalid_argument("half_int8_attention: q/k head dims differ");
    }
    if (k.values.rows() != v.rows()) {
        throw std::invalid_argument("half_int8_attention: k/v row counts differ");
    }
    if (q.scales.len() != q.values.rows() || k.scales.len() != k.values.rows()) {
        throw std::invalid_argument("half_int8_attention: scale length mismatch");
    }
    if (q.values.rows() < 1 || d < 1 || v.cols() < 1) {
        throw std::invalid_argument("half_int8_attention: empty input");
    }
    check_int_gemm_depth(d);
    const float extra = score_scale(cfg, d);
    std::vector<int32_t> s_int;
    auto fill = [&](int64_t i0, int64_t br, int64_t j0, int64_t bc,
                    FloatMatrix& s) {
        s_int.resize(static_cast<size_t>(br * bc));
        detail::int_gemm_nt_strided(q.values.row_ptr(i0), d,
                                    k.values.row_ptr(j0), d, br, bc, d,
                                    s_int.data(), bc);
        for (int64_t r = 0; r < br; ++r) {
            const float sq = q.scales[i0 + r];
            const int32_t* irow = s_int.data() + r * bc;
            float* srow = s.row_ptr(r);
            for (int64_t c = 0; c < bc; ++c) {
                srow[c] = static_cast<float>(irow[c]) * (sq * k.scales[j0 + c]);
            }
            if (extra != 1.0f) {
                for (int64_t c = 0; c < bc; ++c) {
                    srow[c] *= extra;
                }
            }
        }
    };
    return tiled_float_attention(q.values.rows(), k.values.rows(), v, cfg, fill);
}

FloatMatrix fp8_emulated_attention(const FloatMatrix& q, const FloatMatrix& k,
                                   const FloatMatrix& v,
                                   const AttentionConfig& cfg) {
    require_qkv(q, k, v, "fp8_emulated_attention");
    return flash_attention_float(fp8_e4m3_roundtrip(q), fp8_e4m3_roundtrip(k),
                                 fp8_e4m3_roundtrip(v), cfg);
}

}  // namespace ifa
