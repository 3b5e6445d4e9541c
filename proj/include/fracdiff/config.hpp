#pragma once

#include <string>

#include <json.hpp>

namespace fracdiff {

/// Reads the TOML subset used by manifests and problem files into a JSON tree:
/// [table], [a.b], [[array-of-tables]], key = value with dotted keys, strings,
/// integers, floats (inf/nan included), booleans, arrays and inline tables.
/// Dates and multi-line strings are not supported. Throws Parse with a line number.
nlohmann::json parse_config(const std::string& text);
nlohmann::json load_config(const std::string& path);

std::string read_text_file(const std::string& path);

/// Typed lookups with defaults; errors name the offending key path.
double config_number(const nlohmann::json& node, const std::string& key, double fallback);
double config_number(const nlohmann::json& node, const std::string& key);
int config_int(const nlohmann::json& node, const std::string& key, int fallback);
bool config_bool(const nlohmann::json& node, const std::string& key, bool fallback);
std::string config_string(const nlohmann::json& node, const std::string& key,
                          const std::string& fallback);

}  // namespace fracdiff
