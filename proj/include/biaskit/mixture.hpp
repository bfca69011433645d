#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "biaskit/dataset.hpp"
#include "biaskit/rng.hpp"
#include "biaskit/schema.hpp"

namespace biaskit {

struct MixtureComponent {
    std::vector<double> mean;
    std::vector<double> stddev;  // per-axis, all > 0
    std::string label;
    std::size_t count = 0;
};

/// Axis-aligned Gaussian mixture used to synthesize fixtures: both the class
/// mix and the input distribution are fully under the caller's control.
struct MixtureSpec {
    std::vector<MixtureComponent> components;
    std::uint64_t seed = 0;

    void validate() const {
        if (components.empty()) {
            throw std::invalid_argument("mixture: at least one component required");
        }
        const std::size_t dim = components.front().mean.size();
        for (const auto& comp : components) {
            if (comp.mean.size() != dim || comp.stddev.size() != dim) {
                throw std::invalid_argument("mixture: all components must share one dimensionality");
            }
            if (comp.count < 1) {
                throw std::invalid_argument("mixture: component counts must be >= 1");
            }
            for (double s : comp.stddev) {
                if (!(s > 0.0)) {
                    throw std::invalid_argument("mixture: standard deviations must be > 0");
                }
            }
            if (comp.label.empty()) {
                throw std::invalid_argument("mixture: component labels must be non-empty");
            }
        }
    }

    static MixtureSpec from_json(const nlohmann::json& j) {
        MixtureSpec spec;
        spec.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& jc : j.at("components")) {
            MixtureComponent comp;
            comp.mean = jc.at("mean").get<std::vector<double>>();
            comp.stddev = jc.at("std").get<std::vector<double>>();
            comp.label = jc.at("label").get<std::string>();
            comp.count = jc.at("count").get<std::size_t>();
            spec.components.push_back(std::move(comp));
        }
        spec.validate();
        return spec;
    }
};

/// Pure function of the spec: equal specs produce bit-identical datasets.
/// Rows appear in component order; features are named x0..x{d-1}.
inline Dataset generate_mixture(const MixtureSpec& spec) {
    spec.validate();
    const std::size_t dim = spec.components.front().mean.size();

    Dataset ds;
    for (std::size_t d = 0; d < dim; ++d) {
        ds.schema.columns.push_back({"x" + std::to_string(d), ColumnKind::continuous, {}});
    }
    std::set<std::string> labels;
    for (const auto& comp : spec.components) labels.insert(comp.label);
    Column label_col{"label", ColumnKind::categorical, {labels.begin(), labels.end()}};
    ds.schema.columns.push_back(label_col);
    ds.schema.label_column = "label";

    Rng rng(spec.seed);
    for (const auto& comp : spec.components) {
        for (std::size_t i = 0; i < comp.count; ++i) {
            std::vector<double> row(dim);
            for (std::size_t d = 0; d < dim; ++d) {
                row[d] = rng.next_normal(comp.mean[d], comp.stddev[d]);
            }
            ds.rows.push_back(std::move(row));
            ds.labels.push_back(comp.label);
        }
    }
    return ds;
}

}  // namespace biaskit
