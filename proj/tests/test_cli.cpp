// Copyright (C) 2026 The ifa authors
// SPDX-License-Identifier: Apache-2.0
//
// Drives the installed binary end to end through a shell; IFA_CLI_PATH is
// injected by the build.
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "ifa/generate.hpp"
#include "ifa/quant.hpp"
#include "ifa/tensor_io.hpp"

using namespace ifa;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

std::filesystem::path work_dir() {
    const auto dir = std::filesystem::temp_directory_path() / "ifa_cli_test";
    std::filesystem::create_directories(dir);
    return dir;
}

RunResult run_cli(const std::string& args) {
    const auto dir = work_dir();
    const std::string out_path = (dir / "stdout.txt").string();
    const std::string err_path = (dir / "stderr.txt").string();
    const std::string cmd = std::string(IFA_CLI_PATH) + " " + args + " > " +
                            out_path + " 2> " + err_path;
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = read_file(out_path);
    r.err = read_file(err_path);
    return r;
}

}  // namespace

TEST_CASE("help exits cleanly and lists the subcommands") {
    const RunResult r = run_cli("--help");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("mre") != std::string::npos);
    CHECK(r.out.find("verify") != std::string::npos);
}

TEST_CASE("a missing subcommand or bad flag value is a usage error") {
    CHECK(run_cli("").exit_code == 2);
    CHECK(run_cli("mre --seq-len 0").exit_code == 2);
    CHECK(run_cli("mre --dist sideways").exit_code == 2);
}

TEST_CASE("an unknown variant name is a usage error") {
    const RunResult r = run_cli("mre --variants bogus --seq-len 16 --head-dim 8");
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("unknown variant") != std::string::npos);
}

TEST_CASE("small error tables are byte-stable across runs") {
    const std::string args =
        "mre --seq-len 32 --head-dim 8 --block-r 16 --block-c 16 --seeds 2";
    const RunResult first = run_cli(args);
    const RunResult second = run_cli(args);
    CHECK(first.exit_code == 0);
    CHECK(second.exit_code == 0);
    CHECK(first.out == second.out);
    CHECK(first.out.rfind("variant,N,d,dist,seed_count,mre_percent\n", 0) == 0);
    CHECK(first.out.find("full-int8,32,8,normal,2,") != std::string::npos);
}

TEST_CASE("markdown output renders a pipe table") {
    const RunResult r = run_cli(
        "mre --seq-len 16 --head-dim 8 --block-r 8 --block-c 8 --format md "
        "--variants full-int8");
    CHECK(r.exit_code == 0);
    CHECK(r.out.rfind("| variant", 0) == 0);
}

TEST_CASE("the out flag mirrors stdout into a file") {
    const std::string table_path = (work_dir() / "table.csv").string();
    const RunResult r = run_cli(
        "mre --seq-len 16 --head-dim 8 --block-r 8 --block-c 8 --variants "
        "fp8 --out " + table_path);
    CHECK(r.exit_code == 0);
    CHECK(read_file(table_path) == r.out);
}

TEST_CASE("the benchmark table reports medians and modeled traffic") {
    const RunResult r = run_cli(
        "bench --seq-len 32 --head-dim 8 --block-r 16 --block-c 16 "
        "--variants float,full-int8");
    CHECK(r.exit_code == 0);
    CHECK(r.out.rfind("variant,N,median_ms,bytes_loaded_model\n", 0) == 0);
    CHECK(r.out.find("float,32,") != std::string::npos);
    CHECK(r.out.find(",1280\n") != std::string::npos);
}

TEST_CASE("verification passes and prints one line per suite") {
    const RunResult first = run_cli("verify --seed 3");
    const RunResult second = run_cli("verify --seed 3");
    CHECK(first.exit_code == 0);
    CHECK(first.out == second.out);
    CHECK(first.out.find("ok int-gemm-oracle") != std::string::npos);
    CHECK(first.out.find("all 10 suites passed") != std::string::npos);
    CHECK(first.out.find("FAIL") == std::string::npos);
}

TEST_CASE("quantize writes codes plus a scale sidecar") {
    const auto dir = work_dir();
    const std::string in_path = (dir / "acts.ifa").string();
    const std::string out_path = (dir / "acts_i8.ifa").string();
    const FloatMatrix x = generate(ActivationSpec::normal(0.0, 1.0, 5), 6, 4);
    save_tensor(x, in_path);

    const RunResult r = run_cli("quantize " + in_path + " " + out_path);
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("wrote") != std::string::npos);

    const Int8Matrix codes = load_int8_tensor(out_path);
    const QuantizedRows want = quantize_per_row(x);
    CHECK(codes == want.values);
    const FloatMatrix scales = load_float_tensor(out_path + ".scales");
    REQUIRE(scales.rows() == 6);
    for (int64_t i = 0; i < 6; ++i) {
        CHECK(scales(i, 0) == want.scales[i]);
    }

    const RunResult tensor_mode =
        run_cli("quantize --mode per-tensor " + in_path + " " + out_path);
    CHECK(tensor_mode.exit_code == 0);
    const FloatMatrix one_scale = load_float_tensor(out_path + ".scales");
    CHECK(one_scale.rows() == 1);
    CHECK(one_scale(0, 0) == quantize_per_tensor(x).scale);
}

TEST_CASE("runtime failures exit with one and explain themselves") {
    const RunResult missing = run_cli("quantize /no/such/file.ifa out.ifa");
    CHECK(missing.exit_code == 1);
    CHECK(missing.err.find("error:") != std::string::npos);
    CHECK(run_cli("info /no/such/file.ifa").exit_code == 1);
}

TEST_CASE("info prints dtype, shape, and value range") {
    const auto dir = work_dir();
    const std::string path = (dir / "info.ifa").string();
    save_tensor(FloatMatrix(2, 3, {1.0f, -2.0f, 0.0f, 4.0f, 0.5f, -0.25f}), path);
    const RunResult r = run_cli("info " + path);
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("f32") != std::string::npos);
    CHECK(r.out.find("2x3") != std::string::npos);
    CHECK(r.out.find("-2") != std::string::npos);
    CHECK(r.out.find("4") != std::string::npos);
}
