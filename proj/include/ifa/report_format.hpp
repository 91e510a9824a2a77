// Copyright (C) 2026 The ifa authors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <string>
#include <vector>

#include "ifa/eval.hpp"

namespace ifa {

enum class TableFormat { kCsv, kMd };

/// Percentage with 3 significant digits ("4.05", "0.890", "12.3").
std::string format_percent_3sig(double percent);

/// Columns: variant,N,d,dist,seed_count,mre_percent. CSV has a header row;
/// md is an aligned pipe table. Both end with a trailing newline.
std::string format_mre_table(const std::vector<MreReport>& reports,
                             TableFormat format);

/// Columns: variant,N,median_ms,bytes_loaded_model.
std::string format_bench_table(const std::vector<MreReport>& reports,
                               TableFormat format);

}  // namespace ifa
