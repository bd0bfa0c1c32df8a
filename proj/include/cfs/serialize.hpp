#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cfs/measure.hpp"

namespace cfs {

using nlohmann::json;

/// Floating-point formatting used in every CSV: 17 significant digits, enough
/// to round-trip doubles bit-exactly.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline json to_json(const CMatrix& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j)
            row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
        rows.push_back(row);
    }
    return rows;
}

inline CMatrix cmatrix_from_json(const json& j) {
    const int r = static_cast<int>(j.size());
    const int c = r ? static_cast<int>(j[0].size()) : 0;
    CMatrix m(r, c);
    for (int i = 0; i < r; ++i)
        for (int k = 0; k < c; ++k)
            m(i, k) = Complex(j[i][k][0].get<double>(), j[i][k][1].get<double>());
    return m;
}

/// Operators serialize through their dense matrix (row-major re/im pairs).
inline json to_json(const LocalOperator& x) {
    return json{{"dim_h", x.dim_h()}, {"spin_dim", x.spin_dim()}, {"matrix", to_json(x.dense())}};
}

inline LocalOperator local_operator_from_json(const json& j, double tol = 1e-10) {
    return make_local_operator(cmatrix_from_json(j.at("matrix")), j.at("spin_dim").get<int>(),
                               tol);
}

inline json to_json(const DiscreteMeasure& m) {
    json pts = json::array();
    for (const auto& p : m.points) pts.push_back(to_json(p));
    return json{{"points", pts}, {"weights", m.weights}};
}

inline DiscreteMeasure measure_from_json(const json& j) {
    DiscreteMeasure m;
    for (const auto& p : j.at("points")) m.points.push_back(local_operator_from_json(p));
    m.weights = j.at("weights").get<std::vector<double>>();
    m.validate();
    return m;
}

/// CSV writer with a fixed header and 17-significant-digit floats.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
        if (!out_) throw IoFailure("cannot open " + path);
        for (std::size_t i = 0; i < header.size(); ++i)
            out_ << (i ? "," : "") << header[i];
        out_ << "\n";
        cols_ = header.size();
    }

    void row(const std::vector<std::string>& cells) {
        if (cells.size() != cols_) throw IoFailure("csv row width mismatch");
        for (std::size_t i = 0; i < cells.size(); ++i)
            out_ << (i ? "," : "") << cells[i];
        out_ << "\n";
    }

private:
    std::ofstream out_;
    std::size_t cols_ = 0;
};

} // namespace cfs
