#pragma once

#include <string>

#include <json.hpp>

namespace modstab {

using Json = nlohmann::ordered_json;

/// Serializes with two-space indentation, keys in insertion order, floating
/// point numbers in fixed 17-significant-digit form and non-finite numbers as
/// null. The output is byte-stable for equal documents.
std::string to_json_text(const Json& doc);

/// A double as a JSON value: the number, or null when non-finite.
Json json_number(double v);

}  // namespace modstab
