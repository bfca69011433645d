#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace biaskit {

enum class ColumnKind { continuous, categorical };

struct Column {
    std::string name;
    ColumnKind kind = ColumnKind::continuous;
    std::vector<std::string> categories;  // admissible codes; categorical only

    bool operator==(const Column&) const = default;
};

/// Typed column layout of a dataset. The optional label column is part of the
/// schema, but its values are split out of the feature rows at load time.
struct FeatureSchema {
    std::vector<Column> columns;
    std::optional<std::string> label_column;

    std::optional<std::size_t> column_index(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (columns[i].name == name) return i;
        }
        return std::nullopt;
    }

    /// Columns that carry feature values, i.e. all columns except the label.
    std::vector<Column> feature_columns() const {
        std::vector<Column> out;
        out.reserve(columns.size());
        for (const auto& col : columns) {
            if (label_column && col.name == *label_column) continue;
            out.push_back(col);
        }
        return out;
    }

    void validate() const {
        std::set<std::string> seen;
        for (const auto& col : columns) {
            if (col.name.empty()) {
                throw std::invalid_argument("schema: column names must be non-empty");
            }
            if (!seen.insert(col.name).second) {
                throw std::invalid_argument("schema: duplicate column name '" + col.name + "'");
            }
            if (col.kind == ColumnKind::categorical) {
                if (col.categories.empty()) {
                    throw std::invalid_argument("schema: categorical column '" + col.name +
                                                "' has no categories");
                }
                std::set<std::string> cats(col.categories.begin(), col.categories.end());
                if (cats.size() != col.categories.size()) {
                    throw std::invalid_argument("schema: duplicate category in column '" +
                                                col.name + "'");
                }
            } else if (!col.categories.empty()) {
                throw std::invalid_argument("schema: continuous column '" + col.name +
                                            "' must not declare categories");
            }
        }
        if (label_column && !column_index(*label_column)) {
            throw std::invalid_argument("schema: label column '" + *label_column +
                                        "' does not exist");
        }
    }

    bool operator==(const FeatureSchema&) const = default;
};

inline nlohmann::json column_to_json(const Column& col) {
    nlohmann::json j;
    j["name"] = col.name;
    j["kind"] = col.kind == ColumnKind::continuous ? "continuous" : "categorical";
    if (col.kind == ColumnKind::categorical) j["categories"] = col.categories;
    return j;
}

inline Column column_from_json(const nlohmann::json& j) {
    Column col;
    col.name = j.at("name").get<std::string>();
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "continuous") {
        col.kind = ColumnKind::continuous;
    } else if (kind == "categorical") {
        col.kind = ColumnKind::categorical;
        col.categories = j.at("categories").get<std::vector<std::string>>();
    } else {
        throw std::invalid_argument("schema: unknown column kind '" + kind + "'");
    }
    return col;
}

inline nlohmann::json schema_to_json(const FeatureSchema& schema) {
    nlohmann::json j;
    j["columns"] = nlohmann::json::array();
    for (const auto& col : schema.columns) j["columns"].push_back(column_to_json(col));
    if (schema.label_column) j["label"] = *schema.label_column;
    return j;
}

inline FeatureSchema schema_from_json(const nlohmann::json& j) {
    FeatureSchema schema;
    for (const auto& jc : j.at("columns")) schema.columns.push_back(column_from_json(jc));
    if (j.contains("label")) schema.label_column = j.at("label").get<std::string>();
    schema.validate();
    return schema;
}

}  // namespace biaskit
