#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace biaskit {

struct ConfusionMatrix {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fn = 0;

    std::uint64_t total() const { return tp + fp + tn + fn; }
};

/// Counts a binary decision against binary truth; values must be 0 or 1.
inline ConfusionMatrix confusion(const std::vector<int>& predictions,
                                 const std::vector<int>& labels) {
    if (predictions.size() != labels.size()) {
        throw std::invalid_argument("confusion: prediction/label length mismatch");
    }
    if (predictions.empty()) {
        throw std::invalid_argument("confusion: empty input");
    }
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const int p = predictions[i];
        const int y = labels[i];
        if ((p != 0 && p != 1) || (y != 0 && y != 1)) {
            throw std::invalid_argument("confusion: values must be 0 or 1");
        }
        if (p == 1 && y == 1) ++cm.tp;
        else if (p == 1 && y == 0) ++cm.fp;
        else if (p == 0 && y == 0) ++cm.tn;
        else ++cm.fn;
    }
    return cm;
}

inline double accuracy(const ConfusionMatrix& cm) {
    const std::uint64_t n = cm.total();
    if (n == 0) throw std::invalid_argument("accuracy: empty confusion matrix");
    return static_cast<double>(cm.tp + cm.tn) / static_cast<double>(n);
}

inline double recall(const ConfusionMatrix& cm) {
    if (cm.tp + cm.fn == 0) throw std::invalid_argument("recall: no actual positives");
    return static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
}

/// Matthews correlation coefficient, in [-1, 1]. When any factor of the
/// denominator is zero the coefficient is undefined; this returns 0 then
/// (the "no better than chance" reading).
inline double mcc(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw std::invalid_argument("mcc: empty confusion matrix");
    const double tp = static_cast<double>(cm.tp);
    const double fp = static_cast<double>(cm.fp);
    const double tn = static_cast<double>(cm.tn);
    const double fn = static_cast<double>(cm.fn);
    const double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
    if (denom == 0.0) return 0.0;
    return (tp * tn - fp * fn) / std::sqrt(denom);
}

/// Intraclass correlation: fraction of total variance that lies between the
/// groups, from the one-way random-effects ANOVA estimators. The between
/// component is clamped at 0 when the estimator goes negative, so the result
/// is always in [0, 1].
inline double icc(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2) {
        throw std::invalid_argument("icc: at least 2 groups required");
    }
    std::size_t n_total = 0;
    double grand_sum = 0.0;
    for (const auto& g : groups) {
        if (g.empty()) throw std::invalid_argument("icc: empty group");
        n_total += g.size();
        for (double v : g) grand_sum += v;
    }
    if (n_total < 2) throw std::invalid_argument("icc: at least 2 values required");

    const double grand_mean = grand_sum / static_cast<double>(n_total);
    const std::size_t k = groups.size();

    double ss_between = 0.0;
    double ss_within = 0.0;
    double sum_sq_sizes = 0.0;
    for (const auto& g : groups) {
        const double n_g = static_cast<double>(g.size());
        double mean_g = 0.0;
        for (double v : g) mean_g += v;
        mean_g /= n_g;
        ss_between += n_g * (mean_g - grand_mean) * (mean_g - grand_mean);
        for (double v : g) ss_within += (v - mean_g) * (v - mean_g);
        sum_sq_sizes += n_g * n_g;
    }
    if (ss_between + ss_within == 0.0) {
        throw std::invalid_argument("icc: zero total variance");
    }

    const double df_between = static_cast<double>(k - 1);
    const double df_within = static_cast<double>(n_total - k);
    const double ms_between = ss_between / df_between;
    // All-singleton groups leave no within-group degrees of freedom; the
    // within component is then 0 by construction.
    const double ms_within = df_within > 0.0 ? ss_within / df_within : 0.0;

    // Average group size for unbalanced designs.
    const double n0 =
        (static_cast<double>(n_total) - sum_sq_sizes / static_cast<double>(n_total)) / df_between;

    const double var_within = ms_within;
    double var_between = (ms_between - ms_within) / n0;
    if (var_between < 0.0) var_between = 0.0;
    return var_between / (var_between + var_within);
}

}  // namespace biaskit
