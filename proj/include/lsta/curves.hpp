#pragma once

#include <string>
#include <vector>

namespace lsta {

struct MetricsRow {
    std::size_t epoch = 0;
    std::size_t step = 0;
    std::string split;  // "train" or "test"
    double loss = 0.0;
    double accuracy = 0.0;
    long long wall_ms = 0;
};

// Parses a metrics.csv written by train(); malformed lines raise with the
// 1-based line number.
std::vector<MetricsRow> parse_metrics_csv(const std::string& path);

// Writes <out_prefix>_{train,test}_{accuracy,loss}.csv, each "step,value" with
// rows in source order (steps ascending).
std::vector<std::string> export_curves(const std::vector<MetricsRow>& rows,
                                       const std::string& out_prefix);

}  // namespace lsta
