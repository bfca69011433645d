#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "biaskit/csv.hpp"

namespace biaskit {

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

/// Receiver operating characteristic: componentwise non-decreasing points from
/// (0,0) to (1,1), one per distinct decision threshold.
struct RocCurve {
    std::vector<RocPoint> points;
};

/// Sweeps the decision threshold over the distinct scores in descending order;
/// an example is predicted positive when score >= threshold, so all examples
/// tied at one score cross together.
inline RocCurve roc_curve(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size()) {
        throw std::invalid_argument("roc_curve: score/label length mismatch");
    }
    if (scores.empty()) {
        throw std::invalid_argument("roc_curve: empty input");
    }
    std::size_t n_pos = 0;
    for (int y : labels) {
        if (y != 0 && y != 1) throw std::invalid_argument("roc_curve: labels must be 0 or 1");
        n_pos += static_cast<std::size_t>(y);
    }
    const std::size_t n_neg = labels.size() - n_pos;
    if (n_pos == 0 || n_neg == 0) {
        throw std::invalid_argument("roc_curve: both classes must be present");
    }

    std::vector<std::size_t> order(scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocCurve curve;
    curve.points.push_back({0.0, 0.0});
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double threshold = scores[order[i]];
        while (i < order.size() && scores[order[i]] == threshold) {
            if (labels[order[i]] == 1) ++tp;
            else ++fp;
            ++i;
        }
        curve.points.push_back({static_cast<double>(fp) / static_cast<double>(n_neg),
                                static_cast<double>(tp) / static_cast<double>(n_pos)});
    }
    return curve;
}

/// Trapezoidal area under the curve. With the tie rule above this equals the
/// Mann-Whitney concordance value exactly.
inline double auc(const RocCurve& curve) {
    double area = 0.0;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const auto& a = curve.points[i - 1];
        const auto& b = curve.points[i];
        area += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
    }
    return area;
}

/// Two-column CSV of (fpr, tpr) points for external plotting.
inline void write_roc_csv(const RocCurve& curve, std::ostream& out) {
    out << "fpr,tpr\n";
    for (const auto& p : curve.points) {
        out << format_double(p.fpr) << ',' << format_double(p.tpr) << '\n';
    }
}

inline void write_roc_csv(const RocCurve& curve, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open file for writing: " + path.string());
    }
    write_roc_csv(curve, out);
}

}  // namespace biaskit
