#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "biaskit/metrics.hpp"
#include "biaskit/rng.hpp"
#include "biaskit/roc.hpp"

using namespace biaskit;

namespace {

// Concordance oracle: fraction of (positive, negative) pairs where the
// positive outscores the negative, ties counted one half. Independent of the
// curve-sweep route auc() takes.
double pairwise_concordance(const std::vector<double>& scores, const std::vector<int>& labels) {
    double concordant = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != 1) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j] != 0) continue;
            ++pairs;
            if (scores[i] > scores[j]) concordant += 1.0;
            else if (scores[i] == scores[j]) concordant += 0.5;
        }
    }
    return concordant / static_cast<double>(pairs);
}

}  // namespace

TEST_CASE("confusion counts partition the input") {
    SUBCASE("perfect agreement") {
        const auto cm = confusion({1, 1, 0}, {1, 1, 0});
        CHECK(cm.tp == 2);
        CHECK(cm.tn == 1);
        CHECK(cm.fp == 0);
        CHECK(cm.fn == 0);
    }
    SUBCASE("always-majority on a 999/1 split") {
        std::vector<int> preds(1000, 0);
        std::vector<int> labels(1000, 0);
        labels[500] = 1;
        const auto cm = confusion(preds, labels);
        CHECK(cm.tn == 999);
        CHECK(cm.fn == 1);
        CHECK(cm.tp == 0);
        CHECK(cm.fp == 0);
    }
    SUBCASE("always-minority on the same labels") {
        std::vector<int> preds(1000, 1);
        std::vector<int> labels(1000, 0);
        labels[500] = 1;
        const auto cm = confusion(preds, labels);
        CHECK(cm.tp == 1);
        CHECK(cm.fp == 999);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(confusion({1}, {1, 0}), std::invalid_argument);
        CHECK_THROWS_AS(confusion({}, {}), std::invalid_argument);
        CHECK_THROWS_AS(confusion({2}, {1}), std::invalid_argument);
    }
}

TEST_CASE("accuracy") {
    CHECK(accuracy({.tp = 0, .fp = 0, .tn = 999, .fn = 1}) == 0.999);
    CHECK(accuracy({.tp = 5, .fp = 0, .tn = 0, .fn = 0}) == 1.0);
    CHECK(accuracy({.tp = 6, .fp = 1, .tn = 3, .fn = 2}) == 0.75);
    CHECK_THROWS_AS(accuracy({}), std::invalid_argument);
}

TEST_CASE("recall") {
    CHECK(recall({.tp = 1, .fp = 999, .tn = 0, .fn = 0}) == 1.0);
    CHECK(recall({.tp = 0, .fp = 0, .tn = 0, .fn = 1}) == 0.0);
    CHECK(recall({.tp = 6, .fp = 0, .tn = 0, .fn = 2}) == 0.75);
    CHECK_THROWS_AS(recall({.tp = 0, .fp = 1, .tn = 1, .fn = 0}), std::invalid_argument);
}

TEST_CASE("mcc pins the documented values") {
    CHECK(mcc({.tp = 2, .fp = 0, .tn = 1, .fn = 0}) == 1.0);
    // tp + fp = 0 zeroes a denominator factor: convention says 0.
    CHECK(mcc({.tp = 0, .fp = 0, .tn = 999, .fn = 1}) == 0.0);
    // (6*3 - 1*2) / sqrt(7*8*4*5) = 16 / sqrt(1120)
    CHECK(mcc({.tp = 6, .fp = 1, .tn = 3, .fn = 2}) ==
          doctest::Approx(16.0 / std::sqrt(1120.0)).epsilon(1e-12));
    CHECK_THROWS_AS(mcc({}), std::invalid_argument);
}

TEST_CASE("mcc bounds and flip antisymmetry over all small matrices") {
    for (std::uint64_t tp = 0; tp <= 8; ++tp) {
        for (std::uint64_t fp = 0; tp + fp <= 8; ++fp) {
            for (std::uint64_t tn = 0; tp + fp + tn <= 8; ++tn) {
                for (std::uint64_t fn = 0; tp + fp + tn + fn <= 8; ++fn) {
                    if (tp + fp + tn + fn == 0) continue;
                    const double m = mcc({.tp = tp, .fp = fp, .tn = tn, .fn = fn});
                    CHECK(m >= -1.0);
                    CHECK(m <= 1.0);
                    const double flipped = mcc({.tp = fn, .fp = tn, .tn = fp, .fn = tp});
                    CHECK(std::abs(m + flipped) <= 1e-12);
                }
            }
        }
    }
}

TEST_CASE("roc_curve geometry") {
    SUBCASE("perfect ranking passes through (0,1)") {
        const auto curve = roc_curve({0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0});
        bool hits_corner = false;
        for (const auto& p : curve.points) {
            if (p.fpr == 0.0 && p.tpr == 1.0) hits_corner = true;
        }
        CHECK(hits_corner);
        CHECK(auc(curve) == 1.0);
    }
    SUBCASE("all scores equal collapses to the diagonal") {
        const auto curve = roc_curve({0.5, 0.5, 0.5}, {1, 0, 1});
        REQUIRE(curve.points.size() == 2);
        CHECK(curve.points[0].fpr == 0.0);
        CHECK(curve.points[0].tpr == 0.0);
        CHECK(curve.points[1].fpr == 1.0);
        CHECK(curve.points[1].tpr == 1.0);
        CHECK(auc(curve) == 0.5);
    }
    SUBCASE("four-threshold example enumerates exactly") {
        const auto curve = roc_curve({0.9, 0.8, 0.7, 0.1}, {1, 0, 1, 0});
        REQUIRE(curve.points.size() == 5);
        const std::vector<std::pair<double, double>> expected{
            {0.0, 0.0}, {0.0, 0.5}, {0.5, 0.5}, {0.5, 1.0}, {1.0, 1.0}};
        for (std::size_t i = 0; i < expected.size(); ++i) {
            CHECK(curve.points[i].fpr == expected[i].first);
            CHECK(curve.points[i].tpr == expected[i].second);
        }
        // Concordant pairs: 3 of 4 -> 0.75.
        CHECK(auc(curve) == doctest::Approx(0.75).epsilon(1e-12));
    }
    SUBCASE("single-class input is rejected") {
        CHECK_THROWS_AS(roc_curve({0.1, 0.2}, {1, 1}), std::invalid_argument);
        CHECK_THROWS_AS(roc_curve({0.1, 0.2}, {0, 0}), std::invalid_argument);
    }
}

TEST_CASE("roc_curve is monotone and anchored for random inputs") {
    Rng rng(31);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t n = 2 + rng.next_below(30);
        std::vector<double> scores(n);
        std::vector<int> labels(n);
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = static_cast<double>(rng.next_below(6)) / 5.0;
            labels[i] = static_cast<int>(rng.next_below(2));
        }
        labels[0] = 0;
        labels[1] = 1;  // both classes present
        const auto curve = roc_curve(scores, labels);
        CHECK(curve.points.front().fpr == 0.0);
        CHECK(curve.points.front().tpr == 0.0);
        CHECK(curve.points.back().fpr == 1.0);
        CHECK(curve.points.back().tpr == 1.0);
        for (std::size_t i = 1; i < curve.points.size(); ++i) {
            CHECK(curve.points[i].fpr >= curve.points[i - 1].fpr);
            CHECK(curve.points[i].tpr >= curve.points[i - 1].tpr);
        }
        CHECK(auc(curve) ==
              doctest::Approx(pairwise_concordance(scores, labels)).epsilon(1e-12));
    }
}

TEST_CASE("icc endpoints and the hand-computed middle case") {
    // All variance between groups.
    CHECK(icc({{1.0, 1.0}, {5.0, 5.0}}) == 1.0);
    // No between-group variance; negative ANOVA estimate clamps to 0.
    CHECK(icc({{1.0, 5.0}, {1.0, 5.0}}) == 0.0);
    // Balanced one-way ANOVA by hand: group means 1.5/3.5, grand 2.5;
    // SSB=4 (MSB=4), SSW=1 (MSW=0.5), n0=2;
    // var_b=(4-0.5)/2=1.75, var_w=0.5 -> 1.75/2.25 = 7/9.
    CHECK(icc({{1.0, 2.0}, {3.0, 4.0}}) == doctest::Approx(7.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("icc errors") {
    CHECK_THROWS_AS(icc({{1.0, 2.0}}), std::invalid_argument);
    CHECK_THROWS_AS(icc({{1.0, 1.0}, {1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(icc({{}, {1.0}}), std::invalid_argument);
}

TEST_CASE("icc is invariant under shift and scale, and stays in [0,1]") {
    Rng rng(8);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t k = 2 + rng.next_below(4);
        std::vector<std::vector<double>> groups(k);
        for (auto& g : groups) {
            const std::size_t m = 1 + rng.next_below(6);
            for (std::size_t i = 0; i < m; ++i) {
                g.push_back(rng.next_normal(static_cast<double>(rng.next_below(3)), 1.0));
            }
        }
        double value;
        try {
            value = icc(groups);
        } catch (const std::invalid_argument&) {
            continue;  // degenerate draw (zero variance or too few values)
        }
        CHECK(value >= 0.0);
        CHECK(value <= 1.0);

        auto shifted = groups;
        for (auto& g : shifted) {
            for (double& v : g) v += 13.75;
        }
        CHECK(icc(shifted) == doctest::Approx(value).epsilon(1e-9));

        auto scaled = groups;
        for (auto& g : scaled) {
            for (double& v : g) v *= -2.5;
        }
        CHECK(icc(scaled) == doctest::Approx(value).epsilon(1e-9));
    }
}

TEST_CASE("imbalance insensitivity: the 999/1 anomaly example end to end") {
    std::vector<int> labels(1000, 0);
    labels[0] = 1;
    const auto cm_majority = confusion(std::vector<int>(1000, 0), labels);
    CHECK(accuracy(cm_majority) == 0.999);
    CHECK(mcc(cm_majority) == 0.0);

    const auto cm_minority = confusion(std::vector<int>(1000, 1), labels);
    CHECK(recall(cm_minority) == 1.0);
    CHECK(accuracy(cm_minority) == 0.001);
}
