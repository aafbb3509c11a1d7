#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace iftrace::detail {

// First balanced {...} span of `raw` that parses as a JSON object; prose and
// code fences around it are ignored.
std::optional<nlohmann::json> extract_json_object(const std::string& raw);

// Reads an optional list-of-strings key; missing keys yield an empty list,
// wrong types throw SchemaError.
std::vector<std::string> string_list(const nlohmann::json& j, const std::string& key,
                                     const std::string& raw);

}  // namespace iftrace::detail
