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
#include "biaskit/imbalance.hpp"
#include "biaskit/metrics.hpp"
#include "biaskit/rng.hpp"
#include "biaskit/tree.hpp"

namespace biaskit {

// Verdict thresholds on the reported magnitude. Configuration defaults of
// this toolkit, not values from the literature.
inline constexpr double kWeakShiftThreshold = 0.2;
inline constexpr double kStrongShiftThreshold = 0.6;

inline constexpr const char* kOriginColumn = "origin";

/// Covariate-shift audit: the magnitude is the mean cross-validated MCC of a
/// decision tree trained to tell training rows from test rows, clamped to
/// [0, 1] for reporting (below-chance discrimination is noise, not negative
/// shift). fold_mccs keep the raw per-fold values.
struct ShiftReport {
    double magnitude = 0.0;
    std::vector<double> fold_mccs;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    std::map<std::string, double> per_feature_kl;
    std::string verdict;  // "none" | "weak" | "strong"
};

inline nlohmann::json to_json(const ShiftReport& report) {
    nlohmann::json j;
    j["magnitude"] = report.magnitude;
    j["fold_mccs"] = report.fold_mccs;
    j["n_train"] = report.n_train;
    j["n_test"] = report.n_test;
    j["per_feature_kl"] = report.per_feature_kl;
    j["verdict"] = report.verdict;
    return j;
}

inline std::string shift_verdict(double magnitude) {
    if (magnitude < kWeakShiftThreshold) return "none";
    if (magnitude < kStrongShiftThreshold) return "weak";
    return "strong";
}

/// Concatenates the two datasets under an origin label: 1 for training rows,
/// 0 for test rows. Task labels are stripped so they cannot leak into the
/// discriminator; the feature schemas must match exactly.
inline Dataset tag_origin(const Dataset& train, const Dataset& test) {
    if (train.size() == 0 || test.size() == 0) {
        throw std::invalid_argument("tag_origin: both datasets must be non-empty");
    }
    const auto train_features = train.schema.feature_columns();
    const auto test_features = test.schema.feature_columns();
    const std::size_t common = std::min(train_features.size(), test_features.size());
    for (std::size_t c = 0; c < common; ++c) {
        if (!(train_features[c] == test_features[c])) {
            throw std::invalid_argument("tag_origin: schemas differ at column '" +
                                        train_features[c].name + "'");
        }
    }
    if (train_features.size() != test_features.size()) {
        const auto& extra = train_features.size() > test_features.size()
                                ? train_features[common]
                                : test_features[common];
        throw std::invalid_argument("tag_origin: schemas differ at column '" + extra.name + "'");
    }
    for (const auto& col : train_features) {
        if (col.name == kOriginColumn) {
            throw std::invalid_argument("tag_origin: feature column '" +
                                        std::string(kOriginColumn) + "' collides with the origin label");
        }
    }

    Dataset out;
    out.schema.columns = train_features;
    out.schema.columns.push_back({kOriginColumn, ColumnKind::categorical, {"0", "1"}});
    out.schema.label_column = kOriginColumn;

    out.rows.reserve(train.size() + test.size());
    out.labels.reserve(train.size() + test.size());
    for (const auto& row : train.rows) {
        out.rows.push_back(row);
        out.labels.emplace_back("1");
    }
    for (const auto& row : test.rows) {
        out.rows.push_back(row);
        out.labels.emplace_back("0");
    }
    return out;
}

/// KL(test || train) over Laplace-smoothed bin masses. Finite by smoothing,
/// >= 0, and exactly 0 for identical count vectors with equal totals.
inline double kl_from_counts(const std::vector<std::size_t>& train_counts,
                             const std::vector<std::size_t>& test_counts) {
    if (train_counts.size() != test_counts.size() || train_counts.empty()) {
        throw std::invalid_argument("kl_from_counts: count vectors must be non-empty and aligned");
    }
    const double bins = static_cast<double>(train_counts.size());
    double n_train = 0.0;
    double n_test = 0.0;
    for (std::size_t b = 0; b < train_counts.size(); ++b) {
        n_train += static_cast<double>(train_counts[b]);
        n_test += static_cast<double>(test_counts[b]);
    }
    double kl = 0.0;
    for (std::size_t b = 0; b < train_counts.size(); ++b) {
        const double q = (static_cast<double>(train_counts[b]) + 1.0) / (n_train + bins);
        const double p = (static_cast<double>(test_counts[b]) + 1.0) / (n_test + bins);
        kl += p * std::log(p / q);
    }
    return std::max(kl, 0.0);
}

/// Histogram KL estimate for one continuous feature: equal-width bins shared
/// across the two sides, spanning the pooled min-max range.
inline double kl_histogram(const std::vector<double>& train_values,
                           const std::vector<double>& test_values, std::size_t bins) {
    if (train_values.empty() || test_values.empty()) {
        throw std::invalid_argument("kl_histogram: both value lists must be non-empty");
    }
    if (bins < 2) {
        throw std::invalid_argument("kl_histogram: at least 2 bins required");
    }
    double lo = train_values.front();
    double hi = train_values.front();
    for (double v : train_values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    for (double v : test_values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (lo == hi) return 0.0;  // every value equal on both sides: identical point masses

    const double width = (hi - lo) / static_cast<double>(bins);
    const auto bin_of = [&](double v) -> std::size_t {
        const auto b = static_cast<std::size_t>((v - lo) / width);
        return std::min(b, bins - 1);
    };

    std::vector<std::size_t> train_counts(bins, 0);
    std::vector<std::size_t> test_counts(bins, 0);
    for (double v : train_values) ++train_counts[bin_of(v)];
    for (double v : test_values) ++test_counts[bin_of(v)];
    return kl_from_counts(train_counts, test_counts);
}

/// KL estimate for one categorical feature; the categories are the bins.
inline double kl_categorical(const std::vector<double>& train_codes,
                             const std::vector<double>& test_codes, std::size_t n_categories) {
    if (n_categories == 0) {
        throw std::invalid_argument("kl_categorical: no categories");
    }
    std::vector<std::size_t> train_counts(n_categories, 0);
    std::vector<std::size_t> test_counts(n_categories, 0);
    for (double v : train_codes) ++train_counts[static_cast<std::size_t>(v)];
    for (double v : test_codes) ++test_counts[static_cast<std::size_t>(v)];
    return kl_from_counts(train_counts, test_counts);
}

namespace detail {

/// Stratified fold ids per row: within each class the (seeded) shuffled
/// members are dealt round-robin, so every fold holds both classes whenever
/// each class has at least `folds` members.
inline std::vector<std::size_t> stratified_folds(const std::vector<std::string>& labels,
                                                 std::size_t folds, Rng& rng) {
    std::vector<std::size_t> fold_of(labels.size(), 0);
    for (auto& [cls, members] : group_indices_by_label(labels)) {
        std::vector<std::size_t> pool = members;
        rng.shuffle(pool);
        for (std::size_t i = 0; i < pool.size(); ++i) fold_of[pool[i]] = i % folds;
    }
    return fold_of;
}

inline std::vector<double> feature_values(const Dataset& ds, std::size_t f) {
    std::vector<double> values;
    values.reserve(ds.size());
    for (const auto& row : ds.rows) values.push_back(row[f]);
    return values;
}

}  // namespace detail

/// The origin-discriminator audit: stratified k-fold cross-validation of a
/// tree predicting the origin label, scored by out-of-fold MCC at the 0.5
/// probability threshold. Also reports a per-feature histogram KL estimate
/// (test against train) as a univariate diagnostic.
inline ShiftReport detect_shift(const Dataset& train, const Dataset& test,
                                const TreeParams& params = {}, std::size_t folds = 5,
                                std::uint64_t seed = 0, std::size_t kl_bins = 10) {
    if (folds < 2) {
        throw std::invalid_argument("detect_shift: at least 2 folds required");
    }
    const Dataset tagged = tag_origin(train, test);
    if (std::min(train.size(), test.size()) < folds) {
        throw std::invalid_argument("detect_shift: too few rows for " + std::to_string(folds) +
                                    " folds");
    }

    Rng rng(seed);
    const std::vector<std::size_t> fold_of = detail::stratified_folds(tagged.labels, folds, rng);

    ShiftReport report;
    report.n_train = train.size();
    report.n_test = test.size();

    for (std::size_t f = 0; f < folds; ++f) {
        std::vector<std::size_t> fit_idx;
        std::vector<std::size_t> held_idx;
        for (std::size_t i = 0; i < tagged.size(); ++i) {
            (fold_of[i] == f ? held_idx : fit_idx).push_back(i);
        }
        const Dataset fit_set = tagged.subset(fit_idx);
        const DecisionTree tree = fit_tree(fit_set, params);

        std::vector<int> predictions;
        std::vector<int> truths;
        predictions.reserve(held_idx.size());
        truths.reserve(held_idx.size());
        for (std::size_t i : held_idx) {
            predictions.push_back(predict_proba(tree, tagged.rows[i]) > 0.5 ? 1 : 0);
            truths.push_back(tagged.labels[i] == "1" ? 1 : 0);
        }
        report.fold_mccs.push_back(mcc(confusion(predictions, truths)));
    }

    double mean = 0.0;
    for (double v : report.fold_mccs) mean += v;
    mean /= static_cast<double>(report.fold_mccs.size());
    report.magnitude = std::clamp(mean, 0.0, 1.0);
    report.verdict = shift_verdict(report.magnitude);

    const auto features = tagged.schema.feature_columns();
    for (std::size_t f = 0; f < features.size(); ++f) {
        const auto train_values = detail::feature_values(train, f);
        const auto test_values = detail::feature_values(test, f);
        report.per_feature_kl[features[f].name] =
            features[f].kind == ColumnKind::continuous
                ? kl_histogram(train_values, test_values, kl_bins)
                : kl_categorical(train_values, test_values, features[f].categories.size());
    }
    return report;
}

/// Density-ratio weights for the training rows, from the origin
/// discriminator's class posterior: w = [p(s=0|x) / p(s=1|x)] * n_train/n_test.
/// Leaf Laplace smoothing keeps every weight finite and strictly positive.
/// The discriminator fit itself is deterministic; the seed is part of the
/// operation contract and reserved for stochastic discriminators.
inline WeightVector importance_weights(const Dataset& train, const Dataset& test,
                                       const TreeParams& params = {}, std::uint64_t seed = 0) {
    (void)seed;
    const Dataset tagged = tag_origin(train, test);
    const DecisionTree tree = fit_tree(tagged, params);

    const double prior_correction =
        static_cast<double>(train.size()) / static_cast<double>(test.size());

    WeightVector wv;
    wv.weights.reserve(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) {
        const double p_train_origin = predict_proba(tree, tagged.rows[i]);
        wv.weights.push_back((1.0 - p_train_origin) / p_train_origin * prior_correction);
    }
    wv.validate();
    return wv;
}

/// Keeps row i with probability weights[i] / max(weights), independently.
/// One uniform draw is consumed per row regardless of the weights, so under a
/// shared seed raising one weight (max unchanged) can only add rows.
inline Dataset rejection_sample(const Dataset& ds, const WeightVector& wv, std::uint64_t seed) {
    if (wv.weights.size() != ds.size()) {
        throw std::invalid_argument("rejection_sample: weight/row length mismatch");
    }
    wv.validate();
    const double max_weight = *std::max_element(wv.weights.begin(), wv.weights.end());

    Rng rng(seed);
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const double u = rng.next_double();
        if (u * max_weight < wv.weights[i]) keep.push_back(i);
    }
    return ds.subset(keep);
}

}  // namespace biaskit
