// Copyright (C) 2026 The ifa authors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>

#include "ifa/matrix.hpp"

namespace ifa {

/// Malformed tensor file. The message names the offending field
/// ("bad magic", "truncated header", ...).
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class TensorDtype : uint8_t { kF32 = 0, kI8 = 1, kI32 = 2 };

// Binary tensor format, little-endian:
//   magic "IFA1" (4 bytes), dtype code u8, 3 reserved zero bytes,
//   rows u64, cols u64, then the raw row-major payload.
void save_tensor(const FloatMatrix& m, const std::string& path);
void save_tensor(const Int8Matrix& m, const std::string& path);
void save_tensor(const Int32Matrix& m, const std::string& path);

using LoadedTensor = std::variant<FloatMatrix, Int8Matrix, Int32Matrix>;

LoadedTensor load_tensor(const std::string& path);
TensorDtype loaded_dtype(const LoadedTensor& t);

/// Loads a tensor that must be f32; throws FormatError otherwise.
FloatMatrix load_float_tensor(const std::string& path);
/// Loads a tensor that must be i8; throws FormatError otherwise.
Int8Matrix load_int8_tensor(const std::string& path);

}  // namespace ifa
