// serialization.cpp - JSON encoding of complex matrices

#include "tclk/serialization.hpp"

#include <stdexcept>
#include <string>

namespace tclk {

using nlohmann::json;

json matrix_to_json(const Matrix& m)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
        }
        rows.push_back(std::move(row));
    }
    return json{{"dim", json::array({m.rows(), m.cols()})}, {"data", std::move(rows)}};
}

Matrix matrix_from_json(const json& j)
{
    if (!j.is_object()) throw std::invalid_argument("matrix: expected an object");
    for (const auto& [key, _] : j.items()) {
        if (key != "dim" && key != "data") {
            throw std::invalid_argument("matrix: unknown field '" + key + "'");
        }
    }
    if (!j.contains("dim") || !j.contains("data")) {
        throw std::invalid_argument("matrix: requires 'dim' and 'data'");
    }
    long rows = 0;
    long cols = 0;
    const json& dim = j.at("dim");
    if (dim.is_number_integer()) {
        rows = cols = dim.get<long>();
    } else if (dim.is_array() && dim.size() == 2 && dim[0].is_number_integer() &&
               dim[1].is_number_integer()) {
        rows = dim[0].get<long>();
        cols = dim[1].get<long>();
    } else {
        throw std::invalid_argument("matrix: 'dim' must be an integer or [rows, cols]");
    }
    if (rows <= 0 || cols <= 0) throw std::invalid_argument("matrix: 'dim' must be positive");

    const json& data = j.at("data");
    if (!data.is_array() || static_cast<long>(data.size()) != rows) {
        throw std::invalid_argument("matrix: 'data' must hold " + std::to_string(rows) + " rows");
    }
    Matrix m(rows, cols);
    for (long r = 0; r < rows; ++r) {
        const json& row = data[r];
        if (!row.is_array() || static_cast<long>(row.size()) != cols) {
            throw std::invalid_argument("matrix: row " + std::to_string(r) + " must hold " +
                                        std::to_string(cols) + " entries");
        }
        for (long c = 0; c < cols; ++c) {
            const json& z = row[c];
            if (z.is_number()) {
                m(r, c) = z.get<double>();
            } else if (z.is_array() && z.size() == 2 && z[0].is_number() && z[1].is_number()) {
                m(r, c) = Complex{z[0].get<double>(), z[1].get<double>()};
            } else {
                throw std::invalid_argument("matrix: entry (" + std::to_string(r) + "," +
                                            std::to_string(c) + ") must be [re, im]");
            }
        }
    }
    return m;
}

} // namespace tclk
