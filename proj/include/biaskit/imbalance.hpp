#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "biaskit/dataset.hpp"
#include "biaskit/rng.hpp"

namespace biaskit {

/// Empirical class mix of a labeled dataset. class_counts are raw example
/// counts; proportions are count- or weight-mass-based depending on which
/// operation produced the report.
struct ImbalanceReport {
    std::map<std::string, std::size_t> class_counts;
    std::map<std::string, double> proportions;
    double imbalance_ratio = 1.0;  // max proportion / min proportion
    std::string majority_class;
    std::string minority_class;
};

inline nlohmann::json to_json(const ImbalanceReport& report) {
    nlohmann::json j;
    j["class_counts"] = report.class_counts;
    j["proportions"] = report.proportions;
    j["imbalance_ratio"] = report.imbalance_ratio;
    j["majority_class"] = report.majority_class;
    j["minority_class"] = report.minority_class;
    return j;
}

/// Nonnegative per-example weights, aligned with the rows they were computed
/// for. Not normalized: values are the raw target/empirical ratios.
struct WeightVector {
    std::vector<double> weights;

    void validate() const {
        if (weights.empty()) {
            throw std::invalid_argument("weights: empty");
        }
        bool any_positive = false;
        for (double w : weights) {
            if (!std::isfinite(w) || w < 0.0) {
                throw std::invalid_argument("weights: must be finite and >= 0");
            }
            if (w > 0.0) any_positive = true;
        }
        if (!any_positive) {
            throw std::invalid_argument("weights: at least one weight must be > 0");
        }
    }
};

inline nlohmann::json to_json(const WeightVector& wv) {
    nlohmann::json j;
    j["weights"] = wv.weights;
    return j;
}

namespace detail {

inline ImbalanceReport report_from_masses(const std::map<std::string, std::size_t>& counts,
                                          const std::map<std::string, double>& masses) {
    double total = 0.0;
    for (const auto& [cls, mass] : masses) total += mass;
    if (total <= 0.0) {
        throw std::invalid_argument("imbalance report: total mass is zero");
    }

    ImbalanceReport report;
    report.class_counts = counts;
    double max_p = -1.0;
    double min_p = 2.0;
    for (const auto& [cls, mass] : masses) {
        const double p = mass / total;
        report.proportions[cls] = p;
        max_p = std::max(max_p, p);
        min_p = std::min(min_p, p);
    }
    // Ties resolve to the first class in name order; an exact tie across the
    // board still yields two distinct names when there are two classes.
    for (const auto& [cls, p] : report.proportions) {
        if (p == max_p) {
            report.majority_class = cls;
            break;
        }
    }
    for (const auto& [cls, p] : report.proportions) {
        if (p == min_p && cls != report.majority_class) {
            report.minority_class = cls;
            break;
        }
    }
    if (report.minority_class.empty()) report.minority_class = report.majority_class;
    report.imbalance_ratio = max_p / min_p;
    return report;
}

}  // namespace detail

inline ImbalanceReport class_distribution(const std::vector<std::string>& labels) {
    if (labels.empty()) {
        throw std::invalid_argument("class_distribution: empty input");
    }
    std::map<std::string, std::size_t> counts;
    for (const auto& y : labels) ++counts[y];
    std::map<std::string, double> masses;
    for (const auto& [cls, c] : counts) masses[cls] = static_cast<double>(c);
    return detail::report_from_masses(counts, masses);
}

/// Per-example weights that move the empirical class mix onto the target one:
/// weight of example i is target(y_i) / empirical_proportion(y_i). The target
/// must be a distribution over (at least) every class present in the labels.
inline WeightVector class_weights(const std::vector<std::string>& labels,
                                  const std::map<std::string, double>& target) {
    if (labels.empty()) {
        throw std::invalid_argument("class_weights: empty input");
    }
    double target_sum = 0.0;
    for (const auto& [cls, p] : target) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw std::invalid_argument("class_weights: target proportions must be finite and >= 0");
        }
        target_sum += p;
    }
    if (std::abs(target_sum - 1.0) > 1e-9) {
        throw std::invalid_argument("class_weights: target proportions must sum to 1");
    }

    std::map<std::string, std::size_t> counts;
    for (const auto& y : labels) ++counts[y];

    const double n = static_cast<double>(labels.size());
    std::map<std::string, double> per_class;
    for (const auto& [cls, count] : counts) {
        const auto it = target.find(cls);
        if (it == target.end()) {
            throw std::invalid_argument("class_weights: class '" + cls + "' missing from target");
        }
        per_class[cls] = it->second * n / static_cast<double>(count);
    }

    WeightVector wv;
    wv.weights.reserve(labels.size());
    for (const auto& y : labels) wv.weights.push_back(per_class.at(y));
    wv.validate();
    return wv;
}

/// Class mix measured in weight mass instead of example counts. With the
/// output of class_weights this reproduces the requested target exactly.
inline ImbalanceReport effective_distribution(const std::vector<std::string>& labels,
                                              const WeightVector& wv) {
    if (labels.size() != wv.weights.size()) {
        throw std::invalid_argument("effective_distribution: label/weight length mismatch");
    }
    if (labels.empty()) {
        throw std::invalid_argument("effective_distribution: empty input");
    }
    std::map<std::string, std::size_t> counts;
    std::map<std::string, double> masses;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        ++counts[labels[i]];
        masses[labels[i]] += wv.weights[i];
    }
    return detail::report_from_masses(counts, masses);
}

/// Uniformly downsamples every class, without replacement, to the minority
/// count. Output rows keep their input order.
inline Dataset random_undersample(const Dataset& ds, std::uint64_t seed) {
    if (!ds.has_labels()) {
        throw std::invalid_argument("random_undersample: dataset has no labels");
    }
    const auto groups = group_indices_by_label(ds.labels);
    if (groups.size() < 2) {
        throw std::invalid_argument("random_undersample: at least 2 classes required");
    }
    std::size_t min_count = ds.size();
    for (const auto& [cls, idx] : groups) min_count = std::min(min_count, idx.size());

    Rng rng(seed);
    std::vector<std::size_t> keep;
    for (const auto& [cls, idx] : groups) {
        std::vector<std::size_t> pool = idx;
        rng.shuffle(pool);
        keep.insert(keep.end(), pool.begin(), pool.begin() + min_count);
    }
    std::sort(keep.begin(), keep.end());
    return ds.subset(keep);
}

/// Upsamples every class, with replacement, to the majority count. Originals
/// are kept in order; copies are appended.
inline Dataset random_oversample(const Dataset& ds, std::uint64_t seed) {
    if (!ds.has_labels()) {
        throw std::invalid_argument("random_oversample: dataset has no labels");
    }
    const auto groups = group_indices_by_label(ds.labels);
    if (groups.size() < 2) {
        throw std::invalid_argument("random_oversample: at least 2 classes required");
    }
    std::size_t max_count = 0;
    for (const auto& [cls, idx] : groups) max_count = std::max(max_count, idx.size());

    Rng rng(seed);
    std::vector<std::size_t> keep(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) keep[i] = i;
    for (const auto& [cls, idx] : groups) {
        for (std::size_t extra = idx.size(); extra < max_count; ++extra) {
            keep.push_back(idx[rng.next_below(idx.size())]);
        }
    }
    return ds.subset(keep);
}

}  // namespace biaskit
