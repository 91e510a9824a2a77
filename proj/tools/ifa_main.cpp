// Copyright (C) 2026 The ifa authors
// SPDX-License-Identifier: Apache-2.0
//
// Exit codes: 0 success, 1 runtime or I/O failure, 2 usage error.
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ifa/attention.hpp"
#include "ifa/eval.hpp"
#include "ifa/quant.hpp"
#include "ifa/report_format.hpp"
#include "ifa/tensor_io.hpp"
#include "ifa/verify.hpp"

namespace {

struct ShapeFlags {
    int64_t seq_len = 1024;
    int64_t head_dim = 64;
    int64_t batch = 1;
    int64_t heads = 1;
    int64_t block_r = 64;
    int64_t block_c = 64;
    std::string dist = "normal";
    uint64_t seed = 0;
    int seeds = 1;
    std::string variants = "fp8,half-int8,full-int8";
    std::string format = "csv";
    std::string out_path;
};

void add_shape_flags(CLI::App* cmd, ShapeFlags& f) {
    cmd->add_option("--seq-len", f.seq_len, "Sequence length N")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--head-dim", f.head_dim, "Head dimension d")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--batch", f.batch, "Batch size")->check(CLI::PositiveNumber);
    cmd->add_option("--heads", f.heads, "Head count")->check(CLI::PositiveNumber);
    cmd->add_option("--block-r", f.block_r, "Row block size Br")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--block-c", f.block_c, "Column block size Bc")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--dist", f.dist, "Activation distribution")
        ->check(CLI::IsMember({"normal", "uniform"}));
    cmd->add_option("--seed", f.seed, "Base RNG seed");
    cmd->add_option("--seeds", f.seeds, "Seeds to average over")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--variants", f.variants,
                    "Comma list of float,fp8,half-int8,full-int8");
    cmd->add_option("--format", f.format, "Table format")
        ->check(CLI::IsMember({"csv", "md"}));
    cmd->add_option("--out", f.out_path, "Also write the table to this file");
}

bool parse_variants(const std::string& list,
                    std::vector<ifa::AttentionVariant>& out) {
    size_t start = 0;
    while (start <= list.size()) {
        size_t end = list.find(',', start);
        if (end == std::string::npos) {
            end = list.size();
        }
        const std::string name = list.substr(start, end - start);
        if (name == "float") {
            out.push_back(ifa::AttentionVariant::kFloatFlash);
        } else if (name == "fp8") {
            out.push_back(ifa::AttentionVariant::kFp8Emulated);
        } else if (name == "half-int8") {
            out.push_back(ifa::AttentionVariant::kHalfInt8);
        } else if (name == "full-int8") {
            out.push_back(ifa::AttentionVariant::kFullInt8);
        } else {
            std::cerr << "error: unknown variant \"" << name
                      << "\" (expected float, fp8, half-int8, full-int8)\n";
            return false;
        }
        start = end + 1;
    }
    return !out.empty();
}

ifa::ExperimentPlan build_plan(const ShapeFlags& f,
                               const std::vector<ifa::AttentionVariant>& variants) {
    ifa::ExperimentPlan plan;
    for (ifa::AttentionVariant v : variants) {
        ifa::PlanRow row;
        row.variant = v;
        row.seq_len = f.seq_len;
        row.head_dim = f.head_dim;
        row.batch = f.batch;
        row.heads = f.heads;
        row.dist = f.dist == "uniform" ? ifa::ActivationSpec::Dist::kUniform
                                       : ifa::ActivationSpec::Dist::kNormal;
        row.seed = f.seed;
        row.seeds = f.seeds;
        row.blocks = ifa::BlockSpec{f.block_r, f.block_c};
        plan.rows.push_back(row);
    }
    return plan;
}

int emit_table(const std::string& table, const std::string& out_path) {
    std::cout << table;
    if (!out_path.empty()) {
        std::ofstream file(out_path, std::ios::binary);
        if (!file) {
            std::cerr << "error: cannot open " << out_path << " for writing\n";
            return 1;
        }
        file << table;
    }
    return 0;
}

int cmd_mre(const ShapeFlags& f) {
    std::vector<ifa::AttentionVariant> variants;
    if (!parse_variants(f.variants, variants)) {
        return 2;
    }
    const auto reports = ifa::run_table_experiment(build_plan(f, variants));
    const auto format = f.format == "md" ? ifa::TableFormat::kMd
                                         : ifa::TableFormat::kCsv;
    return emit_table(ifa::format_mre_table(reports, format), f.out_path);
}

int cmd_bench(const ShapeFlags& f) {
    std::vector<ifa::AttentionVariant> variants;
    if (!parse_variants(f.variants, variants)) {
        return 2;
    }
    const auto reports = ifa::run_speed_benchmark(build_plan(f, variants));
    const auto format = f.format == "md" ? ifa::TableFormat::kMd
                                         : ifa::TableFormat::kCsv;
    return emit_table(ifa::format_bench_table(reports, format), f.out_path);
}

int cmd_verify(const ShapeFlags& f) {
    ifa::VerifyOptions options;
    options.blocks = ifa::BlockSpec{f.block_r, f.block_c};
    options.seed = f.seed;
    const ifa::VerifyOutcome outcome = ifa::run_verification(options);
    for (const ifa::SuiteResult& s : outcome.suites) {
        if (s.passed) {
            std::cout << "ok " << s.name << "\n";
        } else {
            std::cout << "FAIL " << s.name << ": " << s.detail << "\n";
        }
    }
    if (!outcome.passed()) {
        std::cerr << "verification failed: " << outcome.first_failure() << "\n";
        return 1;
    }
    std::cout << "all " << outcome.suites.size() << " suites passed\n";
    return 0;
}

int cmd_quantize(const std::string& in_path, const std::string& out_path,
                 const std::string& mode) {
    const ifa::FloatMatrix input = ifa::load_float_tensor(in_path);
    ifa::FloatMatrix restored;
    ifa::FloatMatrix scales;
    double bound = 0.0;
    if (mode == "per-tensor") {
        const ifa::QuantizedTensor q = ifa::quantize_per_tensor(input);
        ifa::save_tensor(q.values, out_path);
        scales = ifa::FloatMatrix(1, 1, {q.scale});
        restored = ifa::dequantize_tensor(q);
        bound = 0.5 * q.scale;
    } else {
        const ifa::QuantizedRows q = ifa::quantize_per_row(input);
        ifa::save_tensor(q.values, out_path);
        scales = ifa::FloatMatrix(q.scales.len(), 1, q.scales.storage());
        restored = ifa::dequantize_rows(q);
        for (int64_t r = 0; r < q.scales.len(); ++r) {
            bound = std::max(bound, 0.5 * q.scales[r]);
        }
    }
    ifa::save_tensor(scales, out_path + ".scales");
    double worst = 0.0;
    for (int64_t i = 0; i < input.size(); ++i) {
        worst = std::max(worst, std::fabs(static_cast<double>(restored.data()[i]) -
                                          static_cast<double>(input.data()[i])));
    }
    std::printf("wrote %s (i8 %lldx%lld) and %s.scales\n", out_path.c_str(),
                static_cast<long long>(input.rows()),
                static_cast<long long>(input.cols()), out_path.c_str());
    std::printf("max round-trip error %.6g (bound scale/2 = %.6g)\n", worst,
                bound);
    return 0;
}

int cmd_info(const std::string& path) {
    const ifa::LoadedTensor t = ifa::load_tensor(path);
    const char* dtype = "f32";
    switch (ifa::loaded_dtype(t)) {
        case ifa::TensorDtype::kF32:
            dtype = "f32";
            break;
        case ifa::TensorDtype::kI8:
            dtype = "i8";
            break;
        case ifa::TensorDtype::kI32:
            dtype = "i32";
            break;
    }
    std::visit(
        [&](const auto& m) {
            std::printf("%s: %s %lldx%lld\n", path.c_str(), dtype,
                        static_cast<long long>(m.rows()),
                        static_cast<long long>(m.cols()));
            double lo = 0.0;
            double hi = 0.0;
            if (m.size() > 0) {
                lo = hi = static_cast<double>(m.data()[0]);
                for (int64_t i = 1; i < m.size(); ++i) {
                    lo = std::min(lo, static_cast<double>(m.data()[i]));
                    hi = std::max(hi, static_cast<double>(m.data()[i]));
                }
            }
            std::printf("min %.6g max %.6g\n", lo, hi);
        },
        t);
    return 0;
}

int run(int argc, char** argv) {
    CLI::App app{"Tiled INT8 attention toolkit"};
    app.require_subcommand(1);

    ShapeFlags mre_flags;
    CLI::App* mre_cmd =
        app.add_subcommand("mre", "Measure output error of quantized variants");
    add_shape_flags(mre_cmd, mre_flags);

    ShapeFlags bench_flags;
    bench_flags.variants = "float,fp8,half-int8,full-int8";
    CLI::App* bench_cmd =
        app.add_subcommand("bench", "Time kernels and model memory traffic");
    add_shape_flags(bench_cmd, bench_flags);

    ShapeFlags verify_flags;
    CLI::App* verify_cmd =
        app.add_subcommand("verify", "Run the property suites");
    verify_cmd->add_option("--block-r", verify_flags.block_r, "Row block size")
        ->check(CLI::PositiveNumber);
    verify_cmd->add_option("--block-c", verify_flags.block_c, "Column block size")
        ->check(CLI::PositiveNumber);
    verify_cmd->add_option("--seed", verify_flags.seed, "Base RNG seed");

    std::string quant_in;
    std::string quant_out;
    std::string quant_mode = "per-row";
    CLI::App* quant_cmd =
        app.add_subcommand("quantize", "Quantize an f32 tensor file to i8");
    quant_cmd->add_option("input", quant_in, "Input f32 tensor")->required();
    quant_cmd->add_option("output", quant_out, "Output i8 tensor")->required();
    quant_cmd->add_option("--mode", quant_mode, "Calibration granularity")
        ->check(CLI::IsMember({"per-row", "per-tensor"}));

    std::string info_path;
    CLI::App* info_cmd = app.add_subcommand("info", "Describe a tensor file");
    info_cmd->add_option("path", info_path, "Tensor file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (mre_cmd->parsed()) {
            return cmd_mre(mre_flags);
        }
        if (bench_cmd->parsed()) {
            return cmd_bench(bench_flags);
        }
        if (verify_cmd->parsed()) {
            return cmd_verify(verify_flags);
        }
        if (quant_cmd->parsed()) {
            return cmd_quantize(quant_in, quant_out, quant_mode);
        }
        if (info_cmd->parsed()) {
            return cmd_info(info_path);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    return run(argc, argv);
}
