// Copyright (C) 2026 The ifa authors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ifa {

/// Dense row-major 2-D container. Value-semantic: copies are deep, equality is
/// elementwise. Kernels take matrices by const reference and never mutate
/// their inputs, so shared read-only access across threads is safe.
template <typename T>
class Matrix {
public:
    Matrix() = default;

    Matrix(int64_t rows, int64_t cols)
        : rows_(rows), cols_(cols), data_(checked_size(rows, cols), T{}) {}

    Matrix(int64_t rows, int64_t cols, std::vector<T> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != checked_size(rows, cols)) {
            throw std::invalid_argument("matrix data length " + std::to_string(data_.size()) +
                                        " does not match " + std::to_string(rows) + "x" +
                                        std::to_string(cols));
        }
    }

    int64_t rows() const { return rows_; }
    int64_t cols() const { return cols_; }
    int64_t size() const { return rows_ * cols_; }
    bool empty() const { return data_.empty(); }

    T operator()(int64_t r, int64_t c) const { return data_[static_cast<size_t>(r * cols_ + c)]; }
    T& operator()(int64_t r, int64_t c) { return data_[static_cast<size_t>(r * cols_ + c)]; }

    const T* row_ptr(int64_t r) const { return data_.data() + r * cols_; }
    T* row_ptr(int64_t r) { return data_.data() + r * cols_; }

    const T* data() const { return data_.data(); }
    T* data() { return data_.data(); }

    const std::vector<T>& storage() const { return data_; }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    static size_t checked_size(int64_t rows, int64_t cols) {
        if (rows < 0 || cols < 0) {
            throw std::invalid_argument("negative matrix extent");
        }
        return static_cast<size_t>(rows) * static_cast<size_t>(cols);
    }

    int64_t rows_ = 0;
    int64_t cols_ = 0;
    std::vector<T> data_;
};

using FloatMatrix = Matrix<float>;
using Int8Matrix = Matrix<int8_t>;
using Int32Matrix = Matrix<int32_t>;

/// Per-row dequantization scales, one non-negative float per token.
class ScaleVector {
public:
    ScaleVector() = default;
    explicit ScaleVector(int64_t len) : data_(static_cast<size_t>(len), 0.0f) {}
    explicit ScaleVector(std::vector<float> data) : data_(std::move(data)) {}

    int64_t len() const { return static_cast<int64_t>(data_.size()); }
    float operator[](int64_t i) const { return data_[static_cast<size_t>(i)]; }
    float& operator[](int64_t i) { return data_[static_cast<size_t>(i)]; }

    const float* data() const { return data_.data(); }
    const std::vector<float>& storage() const { return data_; }

    friend bool operator==(const ScaleVector& a, const ScaleVector& b) {
        return a.data_ == b.data_;
    }

private:
    std::vector<float> data_;
};

inline void require_same_shape(const FloatMatrix& a, const FloatMatrix& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument(std::string(what) + ": shape mismatch " +
                                    std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                    " vs " + std::to_string(b.rows()) + "x" +
                                    std::to_string(b.cols()));
    }
}

}  // namespace ifa
