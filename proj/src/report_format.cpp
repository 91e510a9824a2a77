// Copyright (C) 2026 The ifa authors
// SPDX-License-Identifier: Apache-2.0
//
#include "ifa/report_format.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace ifa {

namespace {

std::string fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
    return buf;
}

std::string render(const std::vector<std::vector<std::string>>& cells,
                   TableFormat format) {
    std::string out;
    if (format == TableFormat::kCsv) {
        for (const auto& row : cells) {
            for (size_t c = 0; c < row.size(); ++c) {
                if (c > 0) {
                    out += ',';
                }
                out += row[c];
            }
            out += '\n';
        }
        return out;
    }
    std::vector<size_t> width(cells.front().size(), 0);
    for (const auto& row : cells) {
        for (size_t c = 0; c < row.size(); ++c) {
            width[c] = std::max(width[c], row[c].size());
        }
    }
    for (size_t r = 0; r < cells.size(); ++r) {
        out += '|';
        for (size_t c = 0; c < cells[r].size(); ++c) {
            out += ' ';
            out += cells[r][c];
            out.append(width[c] - cells[r][c].size() + 1, ' ');
            out += '|';
        }
        out += '\n';
        if (r == 0) {
            out += '|';
            for (size_t c = 0; c < width.size(); ++c) {
                out.append(width[c] + 2, '-');
                out += '|';
            }
            out += '\n';
        }
    }
    return out;
}

}  // namespace

std::string format_percent_3sig(double percent) {
    if (percent == 0.0) {
        return "0.00";
    }
    const int decimals = std::clamp(
        2 - static_cast<int>(std::floor(std::log10(std::fabs(percent)))), 0, 12);
    return fixed(percent, decimals);
}

std::string format_mre_table(const std::vector<MreReport>& reports,
                             TableFormat format) {
    std::vector<std::vector<std::string>> cells;
    cells.push_back({"variant", "N", "d", "dist", "seed_count", "mre_percent"});
    for (const MreReport& r : reports) {
        cells.push_back({variant_name(r.variant), std::to_string(r.seq_len),
                         std::to_string(r.head_dim), dist_name(r.dist),
                         std::to_string(r.seeds),
                         format_percent_3sig(r.mre * 100.0)});
    }
    return render(cells, format);
}

std::string format_bench_table(const std::vector<MreReport>& reports,
                               TableFormat format) {
    std::vector<std::vector<std::string>> cells;
    cells.push_back({"variant", "N", "median_ms", "bytes_loaded_model"});
    for (const MreReport& r : reports) {
        cells.push_back({variant_name(r.variant), std::to_string(r.seq_len),
                         fixed(r.wall_time * 1000.0, 3),
                         std::to_string(r.bytes_loaded_model)});
    }
    return render(cells, format);
}

}  // namespace ifa
