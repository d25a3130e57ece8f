#include "lsta/curves.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lsta {

std::vector<MetricsRow> parse_metrics_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("curves: cannot open " + path);
    std::string line;
    std::size_t lineno = 0;
    std::vector<MetricsRow> rows;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (lineno == 1) {
            if (line != "epoch,step,split,loss,accuracy,wall_ms")
                throw std::runtime_error("curves: line 1: unexpected header: " + line);
            continue;
        }
        std::istringstream ss(line);
        std::string field[6];
        for (int k = 0; k < 6; ++k) {
            if (!std::getline(ss, field[k], ','))
                throw std::runtime_error("curves: line " + std::to_string(lineno) +
                                         ": expected 6 fields: " + line);
        }
        MetricsRow row;
        try {
            row.epoch = std::stoull(field[0]);
            row.step = std::stoull(field[1]);
            row.split = field[2];
            row.loss = std::stod(field[3]);
            row.accuracy = std::stod(field[4]);
            row.wall_ms = std::stoll(field[5]);
        } catch (const std::exception&) {
            throw std::runtime_error("curves: line " + std::to_string(lineno) +
                                     ": malformed value: " + line);
        }
        if (row.split != "train" && row.split != "test")
            throw std::runtime_error("curves: line " + std::to_string(lineno) +
                                     ": unknown split '" + row.split + "'");
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<std::string> export_curves(const std::vector<MetricsRow>& rows,
                                       const std::string& out_prefix) {
    std::vector<std::string> written;
    for (const std::string split : {"train", "test"}) {
        for (const std::string metric : {"accuracy", "loss"}) {
            const std::string path = out_prefix + "_" + split + "_" + metric + ".csv";
            std::ofstream out(path, std::ios::trunc);
            if (!out) throw std::runtime_error("curves: cannot write " + path);
            out.precision(17);
            out << "step," << metric << "\n";
            for (const MetricsRow& row : rows) {
                if (row.split != split) continue;
                out << row.step << ',' << (metric == "accuracy" ? row.accuracy : row.loss)
                    << '\n';
            }
            written.push_back(path);
        }
    }
    return written;
}

}  // namespace lsta
