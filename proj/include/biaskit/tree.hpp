#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "biaskit/dataset.hpp"
#include "biaskit/schema.hpp"

namespace biaskit {

struct TreeParams {
    std::size_t max_depth = 6;
    std::size_t min_samples_split = 10;
    double min_impurity_decrease = 1e-7;

    void validate() const {
        if (max_depth < 1) throw std::invalid_argument("tree: max_depth must be >= 1");
        if (min_samples_split < 1) {
            throw std::invalid_argument("tree: min_samples_split must be >= 1");
        }
        if (!(min_impurity_decrease >= 0.0)) {
            throw std::invalid_argument("tree: min_impurity_decrease must be >= 0");
        }
    }
};

struct TreeNode {
    static constexpr std::size_t kNoFeature = std::numeric_limits<std::size_t>::max();

    std::size_t feature = kNoFeature;
    // Continuous split: row[feature] <= threshold goes left.
    double threshold = 0.0;
    // Categorical split (one-vs-rest): row[feature] == category goes left.
    long long category = -1;
    std::size_t left = 0;
    std::size_t right = 0;
    // Leaf payload: Laplace-smoothed class probabilities, [negative, positive].
    double p_negative = 0.0;
    double p_positive = 0.0;

    bool is_leaf() const { return feature == kNoFeature; }
};

/// Axis-aligned binary CART classifier over two classes. Fitting is greedy
/// Gini-decrease maximization with deterministic tie-breaking (lowest feature
/// index, then lowest threshold / category), so it is invariant under row
/// permutation of the training data.
struct DecisionTree {
    std::vector<TreeNode> nodes;  // root at index 0
    std::string negative_label;   // lexicographically smaller class
    std::string positive_label;
    std::vector<Column> feature_columns;  // layout the tree was fit on
    std::size_t depth = 0;
};

namespace detail {

struct SplitCandidate {
    double decrease = -1.0;
    std::size_t feature = TreeNode::kNoFeature;
    double threshold = 0.0;
    long long category = -1;
};

inline double gini(std::size_t c0, std::size_t c1) {
    const double n = static_cast<double>(c0 + c1);
    if (n == 0.0) return 0.0;
    const double p0 = static_cast<double>(c0) / n;
    const double p1 = static_cast<double>(c1) / n;
    return 1.0 - p0 * p0 - p1 * p1;
}

inline double gini_decrease(std::size_t n0, std::size_t n1, std::size_t l0, std::size_t l1) {
    const std::size_t r0 = n0 - l0;
    const std::size_t r1 = n1 - l1;
    const double n = static_cast<double>(n0 + n1);
    const double nl = static_cast<double>(l0 + l1);
    const double nr = static_cast<double>(r0 + r1);
    return gini(n0, n1) - (nl / n) * gini(l0, l1) - (nr / n) * gini(r0, r1);
}

class TreeBuilder {
public:
    TreeBuilder(const Dataset& ds, const TreeParams& params, const std::vector<int>& y)
        : ds_(ds), params_(params), y_(y), features_(ds.schema.feature_columns()) {}

    std::size_t build(std::vector<std::size_t>& idx, std::size_t depth, DecisionTree& tree) {
        tree.depth = std::max(tree.depth, depth);

        std::size_t n1 = 0;
        for (std::size_t i : idx) n1 += static_cast<std::size_t>(y_[i]);
        const std::size_t n0 = idx.size() - n1;

        SplitCandidate best;
        const bool may_split = depth < params_.max_depth && idx.size() >= params_.min_samples_split &&
                               n0 > 0 && n1 > 0;
        if (may_split) best = best_split(idx, n0, n1);

        if (!may_split || best.decrease < params_.min_impurity_decrease) {
            TreeNode leaf;
            leaf.p_negative = static_cast<double>(n0 + 1) / static_cast<double>(idx.size() + 2);
            leaf.p_positive = static_cast<double>(n1 + 1) / static_cast<double>(idx.size() + 2);
            tree.nodes.push_back(leaf);
            return tree.nodes.size() - 1;
        }

        std::vector<std::size_t> left_idx;
        std::vector<std::size_t> right_idx;
        for (std::size_t i : idx) {
            (goes_left(ds_.rows[i], best) ? left_idx : right_idx).push_back(i);
        }
        idx.clear();
        idx.shrink_to_fit();

        const std::size_t self = tree.nodes.size();
        tree.nodes.emplace_back();
        tree.nodes[self].feature = best.feature;
        tree.nodes[self].threshold = best.threshold;
        tree.nodes[self].category = best.category;
        const std::size_t left = build(left_idx, depth + 1, tree);
        const std::size_t right = build(right_idx, depth + 1, tree);
        tree.nodes[self].left = left;
        tree.nodes[self].right = right;
        return self;
    }

private:
    bool goes_left(const std::vector<double>& row, const SplitCandidate& split) const {
        if (features_[split.feature].kind == ColumnKind::continuous) {
            return row[split.feature] <= split.threshold;
        }
        return static_cast<long long>(row[split.feature]) == split.category;
    }

    SplitCandidate best_split(const std::vector<std::size_t>& idx, std::size_t n0,
                              std::size_t n1) const {
        SplitCandidate best;
        for (std::size_t f = 0; f < features_.size(); ++f) {
            if (features_[f].kind == ColumnKind::continuous) {
                scan_continuous(idx, f, n0, n1, best);
            } else {
                scan_categorical(idx, f, n0, n1, best);
            }
        }
        return best;
    }

    // Candidate thresholds are midpoints between consecutive distinct values.
    void scan_continuous(const std::vector<std::size_t>& idx, std::size_t f, std::size_t n0,
                         std::size_t n1, SplitCandidate& best) const {
        // Label counts per distinct value; the map keeps values sorted and
        // makes the scan independent of row order.
        std::map<double, std::pair<std::size_t, std::size_t>> per_value;
        for (std::size_t i : idx) {
            auto& counts = per_value[ds_.rows[i][f]];
            if (y_[i] == 0) ++counts.first;
            else ++counts.second;
        }
        if (per_value.size() < 2) return;

        std::size_t l0 = 0;
        std::size_t l1 = 0;
        auto it = per_value.begin();
        for (std::size_t step = 0; step + 1 < per_value.size(); ++step) {
            const double lo = it->first;
            l0 += it->second.first;
            l1 += it->second.second;
            ++it;
            const double hi = it->first;
            double threshold = lo + (hi - lo) / 2.0;
            if (threshold >= hi) threshold = lo;  // adjacent doubles

            const double decrease = gini_decrease(n0, n1, l0, l1);
            if (decrease > best.decrease) {
                best = {decrease, f, threshold, -1};
            }
        }
    }

    // One-vs-rest on single categories.
    void scan_categorical(const std::vector<std::size_t>& idx, std::size_t f, std::size_t n0,
                          std::size_t n1, SplitCandidate& best) const {
        const std::size_t n_cats = features_[f].categories.size();
        std::vector<std::pair<std::size_t, std::size_t>> per_cat(n_cats, {0, 0});
        for (std::size_t i : idx) {
            auto& counts = per_cat[static_cast<std::size_t>(ds_.rows[i][f])];
            if (y_[i] == 0) ++counts.first;
            else ++counts.second;
        }
        for (std::size_t c = 0; c < n_cats; ++c) {
            const std::size_t l0 = per_cat[c].first;
            const std::size_t l1 = per_cat[c].second;
            if (l0 + l1 == 0 || l0 + l1 == idx.size()) continue;
            const double decrease = gini_decrease(n0, n1, l0, l1);
            if (decrease > best.decrease) {
                best = {decrease, f, 0.0, static_cast<long long>(c)};
            }
        }
    }

    const Dataset& ds_;
    const TreeParams& params_;
    const std::vector<int>& y_;
    std::vector<Column> features_;
};

}  // namespace detail

inline DecisionTree fit_tree(const Dataset& ds, const TreeParams& params = {}) {
    params.validate();
    if (!ds.has_labels()) {
        throw std::invalid_argument("fit_tree: dataset has no labels");
    }
    if (ds.size() < 2) {
        throw std::invalid_argument("fit_tree: at least 2 examples required");
    }
    std::set<std::string> distinct(ds.labels.begin(), ds.labels.end());
    if (distinct.size() == 1) {
        throw std::invalid_argument("fit_tree: single-class input");
    }
    if (distinct.size() != 2) {
        throw std::invalid_argument("fit_tree: exactly 2 classes required, found " +
                                    std::to_string(distinct.size()));
    }

    DecisionTree tree;
    tree.negative_label = *distinct.begin();
    tree.positive_label = *std::next(distinct.begin());
    tree.feature_columns = ds.schema.feature_columns();

    std::vector<int> y(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        y[i] = ds.labels[i] == tree.positive_label ? 1 : 0;
    }

    std::vector<std::size_t> idx(ds.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;

    detail::TreeBuilder builder(ds, params, y);
    builder.build(idx, 0, tree);
    return tree;
}

/// Probability of the positive (lexicographically larger) class at the leaf
/// the row routes to. Laplace smoothing keeps the result strictly inside
/// (0, 1).
inline double predict_proba(const DecisionTree& tree, const std::vector<double>& row) {
    if (row.size() != tree.feature_columns.size()) {
        throw std::invalid_argument("predict_proba: row has " + std::to_string(row.size()) +
                                    " features, tree expects " +
                                    std::to_string(tree.feature_columns.size()));
    }
    for (std::size_t f = 0; f < row.size(); ++f) {
        const Column& col = tree.feature_columns[f];
        if (col.kind == ColumnKind::categorical) {
            const auto code = static_cast<long long>(row[f]);
            if (row[f] != static_cast<double>(code) || code < 0 ||
                code >= static_cast<long long>(col.categories.size())) {
                throw std::invalid_argument("predict_proba: invalid category code for column '" +
                                            col.name + "'");
            }
        }
    }

    std::size_t at = 0;
    while (!tree.nodes[at].is_leaf()) {
        const TreeNode& node = tree.nodes[at];
        const bool left = tree.feature_columns[node.feature].kind == ColumnKind::continuous
                              ? row[node.feature] <= node.threshold
                              : static_cast<long long>(row[node.feature]) == node.category;
        at = left ? node.left : node.right;
    }
    return tree.nodes[at].p_positive;
}

namespace detail {

inline nlohmann::json node_to_json(const DecisionTree& tree, std::size_t at) {
    const TreeNode& node = tree.nodes[at];
    nlohmann::json j;
    if (node.is_leaf()) {
        j["probabilities"] = {node.p_negative, node.p_positive};
        return j;
    }
    const Column& col = tree.feature_columns[node.feature];
    j["feature"] = col.name;
    if (col.kind == ColumnKind::continuous) {
        j["op"] = "<=";
        j["value"] = node.threshold;
    } else {
        j["op"] = "==";
        j["value"] = col.categories.at(static_cast<std::size_t>(node.category));
    }
    j["left"] = node_to_json(tree, node.left);
    j["right"] = node_to_json(tree, node.right);
    return j;
}

inline std::size_t node_from_json(const nlohmann::json& j, DecisionTree& tree,
                                  std::size_t depth) {
    tree.depth = std::max(tree.depth, depth);
    const std::size_t self = tree.nodes.size();
    tree.nodes.emplace_back();
    if (j.contains("probabilities")) {
        const auto probs = j.at("probabilities").get<std::vector<double>>();
        if (probs.size() != 2) {
            throw std::invalid_argument("tree json: leaf probabilities must have 2 entries");
        }
        tree.nodes[self].p_negative = probs[0];
        tree.nodes[self].p_positive = probs[1];
        return self;
    }
    const std::string name = j.at("feature").get<std::string>();
    std::size_t feature = TreeNode::kNoFeature;
    for (std::size_t f = 0; f < tree.feature_columns.size(); ++f) {
        if (tree.feature_columns[f].name == name) {
            feature = f;
            break;
        }
    }
    if (feature == TreeNode::kNoFeature) {
        throw std::invalid_argument("tree json: unknown feature '" + name + "'");
    }
    tree.nodes[self].feature = feature;
    const std::string op = j.at("op").get<std::string>();
    if (op == "<=") {
        tree.nodes[self].threshold = j.at("value").get<double>();
    } else if (op == "==") {
        const std::string cat = j.at("value").get<std::string>();
        const auto& cats = tree.feature_columns[feature].categories;
        const auto it = std::find(cats.begin(), cats.end(), cat);
        if (it == cats.end()) {
            throw std::invalid_argument("tree json: unknown category '" + cat + "'");
        }
        tree.nodes[self].category = it - cats.begin();
    } else {
        throw std::invalid_argument("tree json: unknown op '" + op + "'");
    }
    const std::size_t left = node_from_json(j.at("left"), tree, depth + 1);
    const std::size_t right = node_from_json(j.at("right"), tree, depth + 1);
    tree.nodes[self].left = left;
    tree.nodes[self].right = right;
    return self;
}

}  // namespace detail

inline nlohmann::json tree_to_json(const DecisionTree& tree) {
    nlohmann::json j;
    j["classes"] = {tree.negative_label, tree.positive_label};
    j["features"] = nlohmann::json::array();
    for (const auto& col : tree.feature_columns) j["features"].push_back(column_to_json(col));
    j["depth"] = tree.depth;
    j["root"] = detail::node_to_json(tree, 0);
    return j;
}

inline DecisionTree tree_from_json(const nlohmann::json& j) {
    DecisionTree tree;
    const auto classes = j.at("classes").get<std::vector<std::string>>();
    if (classes.size() != 2) {
        throw std::invalid_argument("tree json: exactly 2 classes required");
    }
    tree.negative_label = classes[0];
    tree.positive_label = classes[1];
    for (const auto& jc : j.at("features")) {
        tree.feature_columns.push_back(column_from_json(jc));
    }
    detail::node_from_json(j.at("root"), tree, 0);
    return tree;
}

}  // namespace biaskit
