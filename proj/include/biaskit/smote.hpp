#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "biaskit/dataset.hpp"
#include "biaskit/rng.hpp"

namespace biaskit {

/// Synthetic minority oversampling: each synthetic example interpolates
/// between a random class member x and one of its k nearest same-class
/// neighbors x_nn (Euclidean), at x + u * (x_nn - x) with u uniform in [0,1].
/// Original rows are retained; classes absent from target_count are left
/// unchanged. Continuous features only; a categorical column is an error
/// rather than a silently wrong interpolation. Synthetics get weight 1 when
/// the input carries weights.
inline Dataset smote(const Dataset& ds, std::size_t k,
                     const std::map<std::string, std::size_t>& target_count, std::uint64_t seed) {
    if (!ds.has_labels()) {
        throw std::invalid_argument("smote: dataset has no labels");
    }
    for (const auto& col : ds.schema.feature_columns()) {
        if (col.kind == ColumnKind::categorical) {
            throw std::invalid_argument("smote: categorical feature '" + col.name +
                                        "' not supported");
        }
    }
    if (k < 1) {
        throw std::invalid_argument("smote: k must be >= 1");
    }

    const auto groups = group_indices_by_label(ds.labels);
    for (const auto& [cls, target] : target_count) {
        const auto it = groups.find(cls);
        if (it == groups.end()) {
            throw std::invalid_argument("smote: class '" + cls + "' not present in dataset");
        }
        const std::size_t current = it->second.size();
        if (target < current) {
            throw std::invalid_argument("smote: cannot shrink class '" + cls + "' (" +
                                        std::to_string(current) + " -> " +
                                        std::to_string(target) + ")");
        }
        if (target > current) {
            if (current < 2) {
                throw std::invalid_argument("smote: class '" + cls +
                                            "' needs >= 2 examples to synthesize from");
            }
            if (k > current - 1) {
                throw std::invalid_argument("smote: k=" + std::to_string(k) +
                                            " exceeds class size - 1 for class '" + cls + "'");
            }
        }
    }

    Dataset out = ds;
    Rng rng(seed);

    for (const auto& [cls, members] : groups) {
        const auto it = target_count.find(cls);
        if (it == target_count.end() || it->second <= members.size()) continue;
        const std::size_t need = it->second - members.size();
        const std::size_t m = members.size();

        // Exact brute-force k-NN inside the class, ties by index.
        std::vector<std::vector<std::size_t>> neighbors(m);
        for (std::size_t a = 0; a < m; ++a) {
            std::vector<std::pair<double, std::size_t>> dist;
            dist.reserve(m - 1);
            for (std::size_t b = 0; b < m; ++b) {
                if (b == a) continue;
                const auto& ra = ds.rows[members[a]];
                const auto& rb = ds.rows[members[b]];
                double d2 = 0.0;
                for (std::size_t f = 0; f < ra.size(); ++f) {
                    const double diff = ra[f] - rb[f];
                    d2 += diff * diff;
                }
                dist.emplace_back(d2, b);
            }
            std::sort(dist.begin(), dist.end());
            neighbors[a].reserve(k);
            for (std::size_t j = 0; j < k; ++j) neighbors[a].push_back(dist[j].second);
        }

        for (std::size_t s = 0; s < need; ++s) {
            const std::size_t base = rng.next_below(m);
            const std::size_t nn = neighbors[base][rng.next_below(k)];
            const double u = rng.next_double();
            const auto& x = ds.rows[members[base]];
            const auto& x_nn = ds.rows[members[nn]];
            std::vector<double> synth(x.size());
            for (std::size_t f = 0; f < x.size(); ++f) {
                synth[f] = x[f] + u * (x_nn[f] - x[f]);
            }
            out.rows.push_back(std::move(synth));
            out.labels.push_back(cls);
            if (out.has_weights()) out.weights.push_back(1.0);
        }
    }
    return out;
}

}  // namespace biaskit
