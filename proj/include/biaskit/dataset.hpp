#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "biaskit/schema.hpp"

namespace biaskit {

/// Dense dataset: one row per example, feature cells in the order of
/// schema.feature_columns(). Categorical cells hold the index of the value in
/// the column's category list, stored as a double. Labels and per-example
/// weights are optional and, when present, align with the rows.
struct Dataset {
    FeatureSchema schema;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> labels;
    std::vector<double> weights;

    std::size_t size() const { return rows.size(); }
    bool has_labels() const { return !labels.empty(); }
    bool has_weights() const { return !weights.empty(); }

    std::size_t feature_count() const {
        std::size_t n = schema.columns.size();
        if (schema.label_column) --n;
        return n;
    }

    Dataset subset(const std::vector<std::size_t>& indices) const {
        Dataset out;
        out.schema = schema;
        out.rows.reserve(indices.size());
        if (has_labels()) out.labels.reserve(indices.size());
        if (has_weights()) out.weights.reserve(indices.size());
        for (std::size_t i : indices) {
            out.rows.push_back(rows.at(i));
            if (has_labels()) out.labels.push_back(labels[i]);
            if (has_weights()) out.weights.push_back(weights[i]);
        }
        return out;
    }

    void validate() const {
        schema.validate();
        const auto features = schema.feature_columns();
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != features.size()) {
                throw std::invalid_argument("dataset: row " + std::to_string(r) +
                                            " has wrong cell count");
            }
            for (std::size_t c = 0; c < features.size(); ++c) {
                const double v = rows[r][c];
                if (features[c].kind == ColumnKind::continuous) {
                    if (!std::isfinite(v)) {
                        throw std::invalid_argument("dataset: non-finite value in column '" +
                                                    features[c].name + "', row " +
                                                    std::to_string(r));
                    }
                } else {
                    const auto code = static_cast<long long>(v);
                    if (v != static_cast<double>(code) || code < 0 ||
                        code >= static_cast<long long>(features[c].categories.size())) {
                        throw std::invalid_argument("dataset: invalid category code in column '" +
                                                    features[c].name + "', row " +
                                                    std::to_string(r));
                    }
                }
            }
        }
        if (!labels.empty() && labels.size() != rows.size()) {
            throw std::invalid_argument("dataset: label count does not match row count");
        }
        if (!weights.empty()) {
            if (weights.size() != rows.size()) {
                throw std::invalid_argument("dataset: weight count does not match row count");
            }
            for (double w : weights) {
                if (!std::isfinite(w) || w < 0.0) {
                    throw std::invalid_argument("dataset: weights must be finite and >= 0");
                }
            }
        }
    }
};

/// Row indices per class label, keys in sorted label order.
inline std::map<std::string, std::vector<std::size_t>> group_indices_by_label(
    const std::vector<std::string>& labels) {
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(i);
    return groups;
}

}  // namespace biaskit
