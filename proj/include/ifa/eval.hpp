// Copyright (C) 2026 The ifa authors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ifa/attention.hpp"
#include "ifa/generate.hpp"

namespace ifa {

/// One experiment cell: which variant to run at which shape, how many seeds
/// to average over, and the tiling to use.
struct PlanRow {
    AttentionVariant variant = AttentionVariant::kFullInt8;
    int64_t seq_len = 1024;
    int64_t head_dim = 64;
    int64_t batch = 1;
    int64_t heads = 1;
    ActivationSpec::Dist dist = ActivationSpec::Dist::kNormal;
    uint64_t seed = 0;
    int seeds = 1;
    BlockSpec blocks{};
};

struct ExperimentPlan {
    std::vector<PlanRow> rows;

    void validate() const;
};

/// Result for one plan row. mre is the seed-averaged output error against the
/// 64-bit reference; the activation_mre_* fields hold the per-matrix
/// quantize/restore round-trip error of the variant's inputs (0 where a
/// matrix stays float). bytes_loaded_model is the analytic traffic count.
struct MreReport {
    AttentionVariant variant = AttentionVariant::kFullInt8;
    int64_t seq_len = 0;
    int64_t head_dim = 0;
    int64_t batch = 1;
    int64_t heads = 1;
    ActivationSpec::Dist dist = ActivationSpec::Dist::kNormal;
    uint64_t seed = 0;
    int seeds = 1;
    double mre = 0.0;
    double wall_time = 0.0;  // seconds; median kernel time for bench runs
    int64_t bytes_loaded_model = 0;
    double activation_mre_q = 0.0;
    double activation_mre_k = 0.0;
    double activation_mre_v = 0.0;
};

/// Normalized-L1 error: sum|candidate - reference| / sum|reference|.
/// Throws std::domain_error when the reference is all zero.
double mre(const FloatMatrix& reference, const FloatMatrix& candidate);

/// Modeled bytes read from memory by one forward pass under the tiling
/// schedule: Q read once, K and V read ceil(N/Br) times, element width by
/// variant (int8 tensors 1 byte, float 4). The untiled reference reads each
/// tensor once.
int64_t modeled_bytes_loaded(AttentionVariant variant, int64_t seq_len,
                             int64_t head_dim, int64_t batch, int64_t heads,
                             const BlockSpec& blocks);

/// Runs every plan row and reports seed-averaged output MRE vs the reference.
/// Rows sharing shape, distribution, and seeds share generated inputs and one
/// reference computation. Reports come back in plan order and are
/// bit-deterministic for a fixed plan.
std::vector<MreReport> run_table_experiment(const ExperimentPlan& plan);

/// Times each plan row's kernel: 2 warmups, then the median of 5 runs lands
/// in wall_time. Input generation and quantization stay outside the timed
/// region. Rows run sequentially so timings do not disturb each other.
std::vector<MreReport> run_speed_benchmark(const ExperimentPlan& plan);

/// Stable lowercase names used in tables and CLI flags:
/// float, fp8, half-int8, full-int8, reference.
std::string variant_name(AttentionVariant v);
std::string dist_name(ActivationSpec::Dist d);

}  // namespace ifa
