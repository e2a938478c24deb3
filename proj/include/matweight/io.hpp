// SPDX-License-Identifier: Apache-2.0
//
// JSON documents for weights, functions, multiplier symbols and Carleson
// sequences, plus number formatting shared by all text output.
#pragma once

#include <string>

#include "json.hpp"

#include "matweight/bounds.hpp"
#include "matweight/dyadic.hpp"
#include "matweight/operators.hpp"
#include "matweight/weights.hpp"

namespace matweight {

/// Shortest decimal that round-trips; integral values keep a ".0".
std::string format_number(double v);

WeightField weight_from_json(const nlohmann::json& j);
VectorField function_from_json(const nlohmann::json& j);
MultiplierSymbol symbol_from_json(const nlohmann::json& j);
CarlesonSequence sequence_from_json(const nlohmann::json& j);

nlohmann::json to_json(const WeightField& w);
nlohmann::json to_json(const VectorField& f);
nlohmann::json to_json(const MultiplierSymbol& s);
nlohmann::json to_json(const CarlesonSequence& a);

/// Throws InputError when the file is missing or is not valid JSON.
nlohmann::json read_json(const std::string& path);
void write_json(const std::string& path, const nlohmann::json& j);

inline WeightField load_weight(const std::string& path) { return weight_from_json(read_json(path)); }
inline VectorField load_function(const std::string& path) { return function_from_json(read_json(path)); }
inline MultiplierSymbol load_symbol(const std::string& path) { return symbol_from_json(read_json(path)); }
inline CarlesonSequence load_sequence(const std::string& path) { return sequence_from_json(read_json(path)); }

}  // namespace matweight
