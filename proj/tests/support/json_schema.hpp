#pragma once

// Minimal JSON-schema checker covering the subset the API schema uses:
// type, properties, required, additionalProperties (boolean), items,
// minItems, enum. Returns human-readable problems; empty means valid.

#include <string>
#include <vector>

#include "json.hpp"

namespace test_support {

inline bool type_matches(const nlohmann::json& value, const std::string& type) {
    if (type == "object") return value.is_object();
    if (type == "array") return value.is_array();
    if (type == "string") return value.is_string();
    if (type == "integer") return value.is_number_integer();
    if (type == "number") return value.is_number();
    if (type == "boolean") return value.is_boolean();
    if (type == "null") return value.is_null();
    return false;
}

inline void check_schema(const nlohmann::json& schema, const nlohmann::json& value,
                         const std::string& path, std::vector<std::string>& problems) {
    if (schema.contains("type")) {
        const std::string type = schema["type"].get<std::string>();
        if (!type_matches(value, type)) {
            problems.push_back(path + ": expected " + type + ", got " + value.type_name());
            return;
        }
    }
    if (schema.contains("enum")) {
        bool found = false;
        for (const auto& allowed : schema["enum"]) {
            if (allowed == value) found = true;
        }
        if (!found) problems.push_back(path + ": value not in enum");
    }
    if (value.is_object()) {
        if (schema.contains("required")) {
            for (const auto& key : schema["required"]) {
                if (!value.contains(key.get<std::string>())) {
                    problems.push_back(path + ": missing required key " + key.get<std::string>());
                }
            }
        }
        const auto& props =
            schema.contains("properties") ? schema["properties"] : nlohmann::json::object();
        for (const auto& [key, sub] : value.items()) {
            if (props.contains(key)) {
                check_schema(props[key], sub, path + "." + key, problems);
            } else if (schema.value("additionalProperties", true) == false) {
                problems.push_back(path + ": unexpected key " + key);
            }
        }
    }
    if (value.is_array()) {
        if (schema.contains("minItems") &&
            value.size() < schema["minItems"].get<std::size_t>()) {
            problems.push_back(path + ": fewer than minItems entries");
        }
        if (schema.contains("items")) {
            for (std::size_t i = 0; i < value.size(); ++i) {
                check_schema(schema["items"], value[i], path + "[" + std::to_string(i) + "]",
                             problems);
            }
        }
    }
}

inline std::vector<std::string> validate_schema(const nlohmann::json& schema,
                                                const nlohmann::json& value) {
    std::vector<std::string> problems;
    check_schema(schema, value, "$", problems);
    return problems;
}

}  // namespace test_support
