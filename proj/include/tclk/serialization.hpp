// serialization.hpp - JSON encoding of complex matrices

#pragma once

#include <json.hpp>

#include "tclk/operators.hpp"

namespace tclk {

/// {"dim": [rows, cols], "data": [[[re, im], ...], ...]} with rows in order.
nlohmann::json matrix_to_json(const Matrix& m);

/// Accepts "dim" as an integer (square) or [rows, cols]. Throws
/// std::invalid_argument with a description of the first malformed element.
Matrix matrix_from_json(const nlohmann::json& j);

} // namespace tclk
