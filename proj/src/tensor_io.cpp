// Copyright (C) 2026 The ifa authors
// SPDX-License-Identifier: Apache-2.0
//
#include "ifa/tensor_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

namespace ifa {

namespace {

constexpr char kMagic[4] = {'I', 'F', 'A', '1'};
constexpr size_t kHeaderSize = 4 + 1 + 3 + 8 + 8;
// Caps rows*cols*width at a few GiB so a corrupt header cannot drive a
// runaway allocation.
constexpr uint64_t kMaxElems = uint64_t{1} << 33;

void put_u64_le(uint8_t* dst, uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        dst[i] = static_cast<uint8_t>(v >> (8 * i));
    }
}

uint64_t get_u64_le(const uint8_t* src) {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
        v |= static_cast<uint64_t>(src[i]) << (8 * i);
    }
    return v;
}

template <typename T>
void encode_payload(const T* src, int64_t n, std::vector<uint8_t>& out) {
    out.resize(static_cast<size_t>(n) * sizeof(T));
    if constexpr (sizeof(T) == 1) {
        std::memcpy(out.data(), src, out.size());
    } else {
        using U = std::conditional_t<sizeof(T) == 4, uint32_t, uint64_t>;
        uint8_t* dst = out.data();
        for (int64_t i = 0; i < n; ++i) {
            U bits = std::bit_cast<U>(src[i]);
            for (size_t b = 0; b < sizeof(T); ++b) {
                dst[static_cast<size_t>(i) * sizeof(T) + b] = static_cast<uint8_t>(bits >> (8 * b));
            }
        }
    }
}

template <typename T>
void decode_payload(const uint8_t* src, int64_t n, T* dst) {
    if constexpr (sizeof(T) == 1) {
        std::memcpy(dst, src, static_cast<size_t>(n));
    } else {
        using U = std::conditional_t<sizeof(T) == 4, uint32_t, uint64_t>;
        for (int64_t i = 0; i < n; ++i) {
            U bits = 0;
            for (size_t b = 0; b < sizeof(T); ++b) {
                bits |= static_cast<U>(src[static_cast<size_t>(i) * sizeof(T) + b]) << (8 * b);
            }
            dst[i] = std::bit_cast<T>(bits);
        }
    }
}

template <typename T>
void save_impl(const Matrix<T>& m, TensorDtype dtype, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw FormatError("cannot open for writing: " + path);
    }
    uint8_t header[kHeaderSize] = {};
    std::memcpy(header, kMagic, 4);
    header[4] = static_cast<uint8_t>(dtype);
    put_u64_le(header + 8, static_cast<uint64_t>(m.rows()));
    put_u64_le(header + 16, static_cast<uint64_t>(m.cols()));
    out.write(reinterpret_cast<const char*>(header), kHeaderSize);

    std::vector<uint8_t> payload;
    encode_payload(m.data(), m.size(), payload);
    out.write(reinterpret_cast<const char*>(payload.data()),
              static_cast<std::streamsize>(payload.size()));
    if (!out) {
        throw FormatError("short write: " + path);
    }
}

template <typename T>
Matrix<T> decode_matrix(const std::vector<uint8_t>& bytes, int64_t rows, int64_t cols) {
    Matrix<T> m(rows, cols);
    const size_t want = static_cast<size_t>(m.size()) * sizeof(T);
    const size_t have = bytes.size() - kHeaderSize;
    if (have < want) {
        throw FormatError("truncated payload: expected " + std::to_string(want) + " bytes, got " +
                          std::to_string(have));
    }
    if (have > want) {
        throw FormatError("oversized payload: expected " + std::to_string(want) + " bytes, got " +
                          std::to_string(have));
    }
    decode_payload(bytes.data() + kHeaderSize, m.size(), m.data());
    return m;
}

}  // namespace

void save_tensor(const FloatMatrix& m, const std::string& path) {
    save_impl(m, TensorDtype::kF32, path);
}
void save_tensor(const Int8Matrix& m, const std::string& path) {
    save_impl(m, TensorDtype::kI8, path);
}
void save_tensor(const Int32Matrix& m, const std::string& path) {
    save_impl(m, TensorDtype::kI32, path);
}

LoadedTensor load_tensor(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open: " + path);
    }
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() < kHeaderSize) {
        throw FormatError("truncated header: " + std::to_string(bytes.size()) + " bytes");
    }
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw FormatError("bad magic");
    }
    const uint8_t dtype = bytes[4];
    if (bytes[5] != 0 || bytes[6] != 0 || bytes[7] != 0) {
        throw FormatError("nonzero reserved bytes");
    }
    const uint64_t rows = get_u64_le(bytes.data() + 8);
    const uint64_t cols = get_u64_le(bytes.data() + 16);
    if (rows > kMaxElems || cols > kMaxElems || (rows != 0 && cols > kMaxElems / rows)) {
        throw FormatError("header dimensions overflow: " + std::to_string(rows) + "x" +
                          std::to_string(cols));
    }
    const int64_t r = static_cast<int64_t>(rows);
    const int64_t c = static_cast<int64_t>(cols);

    switch (dtype) {
        case static_cast<uint8_t>(TensorDtype::kF32):
            return decode_matrix<float>(bytes, r, c);
        case static_cast<uint8_t>(TensorDtype::kI8):
            return decode_matrix<int8_t>(bytes, r, c);
        case static_cast<uint8_t>(TensorDtype::kI32):
            return decode_matrix<int32_t>(bytes, r, c);
        default:
            throw FormatError("bad dtype code " + std::to_string(dtype));
    }
}

TensorDtype loaded_dtype(const LoadedTensor& t) {
    if (std::holds_alternative<FloatMatrix>(t)) return TensorDtype::kF32;
    if (std::holds_alternative<Int8Matrix>(t)) return TensorDtype::kI8;
    return TensorDtype::kI32;
}

FloatMatrix load_float_tensor(const std::string& path) {
    LoadedTensor t = load_tensor(path);
    if (auto* m = std::get_if<FloatMatrix>(&t)) {
        return std::move(*m);
    }
    throw FormatError("expected f32 tensor: " + path);
}

Int8Matrix load_int8_tensor(const std::string& path) {
    LoadedTensor t = load_tensor(path);
    if (auto* m = std::get_if<Int8Matrix>(&t)) {
        return std::move(*m);
    }
    throw FormatError("expected i8 tensor: " + path);
}

}  // namespace ifa
