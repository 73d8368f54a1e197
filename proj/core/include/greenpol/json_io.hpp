#pragma once

#include <string>

#include <json.hpp>

namespace greenpol {

// 17-significant-digit decimal form; round-trips any finite double.
std::string format_double(double v);

// Serializes with insertion-ordered keys, two-space indentation, LF line
// endings and %.17g doubles, so identical inputs give byte-identical
// output.
std::string dump_json(const nlohmann::ordered_json& j);

}  // namespace greenpol
