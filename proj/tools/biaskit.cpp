// biaskit: audit and correct class imbalance and covariate shift in datasets.
//
// Subcommands: audit-imbalance, detect-shift, resample, weigh, roc.
// Human-readable summaries go to stdout; machine-readable JSON goes to --out.
// Every JSON report embeds the effective configuration, the seed and input
// checksums, so a report is reproducible evidence: identical inputs, flags
// and seed give byte-identical output.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "biaskit/biaskit.hpp"

namespace {

using nlohmann::json;

constexpr int kExitValidation = 2;

std::string fnv1a64_hex(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open file: " + path.string());
    }
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    char ch;
    while (in.get(ch)) {
        hash ^= static_cast<unsigned char>(ch);
        hash *= 0x100000001b3ULL;
    }
    static const char* digits = "0123456789abcdef";
    std::string hex = "fnv1a64:";
    for (int shift = 60; shift >= 0; shift -= 4) hex.push_back(digits[(hash >> shift) & 0xf]);
    return hex;
}

json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open file: " + path.string());
    }
    return json::parse(in);
}

biaskit::FeatureSchema load_schema(const std::filesystem::path& path) {
    return biaskit::schema_from_json(load_json_file(path));
}

void write_report(const std::filesystem::path& out, const std::string& command,
                  std::uint64_t seed, const json& config,
                  const std::map<std::string, std::string>& input_checksums,
                  const json& report) {
    json j;
    j["command"] = command;
    j["seed"] = seed;
    j["config"] = config;
    j["inputs"] = input_checksums;
    j["report"] = report;
    std::ofstream os(out);
    if (!os) {
        throw std::runtime_error("cannot open file for writing: " + out.string());
    }
    os << j.dump(2) << '\n';
}

/// --target value: "uniform" or a path to a JSON object {class: proportion}.
std::map<std::string, double> resolve_target_proportions(
    const std::string& target, const std::vector<std::string>& labels) {
    if (target == "uniform") {
        std::set<std::string> classes(labels.begin(), labels.end());
        std::map<std::string, double> out;
        for (const auto& cls : classes) {
            out[cls] = 1.0 / static_cast<double>(classes.size());
        }
        return out;
    }
    return load_json_file(target).get<std::map<std::string, double>>();
}

struct PredictionFile {
    std::vector<double> scores;
    std::vector<int> labels;
};

/// Two relevant columns, header-named "score" and "label"; label is 0 or 1.
PredictionFile load_predictions(const std::filesystem::path& path) {
    biaskit::FeatureSchema schema;
    schema.columns.push_back({"score", biaskit::ColumnKind::continuous, {}});
    schema.columns.push_back({"label", biaskit::ColumnKind::categorical, {"0", "1"}});
    schema.label_column = "label";
    const biaskit::Dataset ds = biaskit::load_csv(path, schema);
    PredictionFile out;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        out.scores.push_back(ds.rows[i][0]);
        out.labels.push_back(ds.labels[i] == "1" ? 1 : 0);
    }
    return out;
}

int run_audit_imbalance(const std::string& input, const std::string& schema_path,
                        const std::string& out, std::uint64_t seed) {
    const auto schema = load_schema(schema_path);
    const auto ds = biaskit::load_csv(input, schema);
    if (!ds.has_labels()) {
        throw std::runtime_error("audit-imbalance: schema declares no label column");
    }
    const auto report = biaskit::class_distribution(ds.labels);

    if (!out.empty()) {
        json config;
        config["input"] = input;
        config["schema"] = schema_path;
        config["out"] = out;
        write_report(out, "audit-imbalance", seed, config,
                     {{input, fnv1a64_hex(input)}, {schema_path, fnv1a64_hex(schema_path)}},
                     biaskit::to_json(report));
    }

    std::cout << "classes: " << report.class_counts.size() << ", n: " << ds.size() << '\n';
    std::cout << "majority: " << report.majority_class << " ("
              << report.proportions.at(report.majority_class) << ")\n";
    std::cout << "minority: " << report.minority_class << " ("
              << report.proportions.at(report.minority_class) << ")\n";
    std::cout << "imbalance ratio: " << report.imbalance_ratio << '\n';
    if (!out.empty()) std::cout << "report written to " << out << '\n';
    return 0;
}

int run_detect_shift(const std::string& train_path, const std::string& test_path,
                     const std::string& schema_path, const std::string& out,
                     const std::string& tree_out, std::size_t folds, std::size_t bins,
                     const biaskit::TreeParams& params, std::uint64_t seed) {
    const auto schema = load_schema(schema_path);
    const auto train = biaskit::load_csv(train_path, schema);
    const auto test = biaskit::load_csv(test_path, schema);
    const auto report = biaskit::detect_shift(train, test, params, folds, seed, bins);

    if (!out.empty()) {
        json config;
        config["train"] = train_path;
        config["test"] = test_path;
        config["schema"] = schema_path;
        config["out"] = out;
        config["folds"] = folds;
        config["bins"] = bins;
        config["max_depth"] = params.max_depth;
        config["min_samples_split"] = params.min_samples_split;
        config["min_impurity_decrease"] = params.min_impurity_decrease;
        if (!tree_out.empty()) config["tree_out"] = tree_out;
        write_report(out, "detect-shift", seed, config,
                     {{train_path, fnv1a64_hex(train_path)},
                      {test_path, fnv1a64_hex(test_path)},
                      {schema_path, fnv1a64_hex(schema_path)}},
                     biaskit::to_json(report));
    }

    if (!tree_out.empty()) {
        const auto tagged = biaskit::tag_origin(train, test);
        const auto tree = biaskit::fit_tree(tagged, params);
        std::ofstream os(tree_out);
        if (!os) {
            throw std::runtime_error("cannot open file for writing: " + tree_out);
        }
        os << biaskit::tree_to_json(tree).dump(2) << '\n';
    }

    std::cout << "shift magnitude: " << report.magnitude << " (" << report.verdict << ")\n";
    std::cout << "n_train: " << report.n_train << ", n_test: " << report.n_test
              << ", folds: " << folds << '\n';
    if (!out.empty()) std::cout << "report written to " << out << '\n';
    return 0;
}

int run_resample(const std::string& input, const std::string& schema_path,
                 const std::string& method, const std::string& target, std::size_t k,
                 const std::string& out, std::uint64_t seed) {
    const auto schema = load_schema(schema_path);
    const auto ds = biaskit::load_csv(input, schema);

    biaskit::Dataset corrected;
    if (method == "undersample") {
        corrected = biaskit::random_undersample(ds, seed);
    } else if (method == "oversample") {
        corrected = biaskit::random_oversample(ds, seed);
    } else if (method == "smote") {
        std::map<std::string, std::size_t> target_counts;
        if (target == "uniform") {
            // SMOTE only grows: uniform means every class up to the majority.
            std::map<std::string, std::size_t> counts;
            for (const auto& y : ds.labels) ++counts[y];
            std::size_t max_count = 0;
            for (const auto& [cls, c] : counts) max_count = std::max(max_count, c);
            for (const auto& [cls, c] : counts) target_counts[cls] = max_count;
        } else {
            target_counts = load_json_file(target).get<std::map<std::string, std::size_t>>();
        }
        corrected = biaskit::smote(ds, k, target_counts, seed);
    } else {
        throw std::runtime_error("resample: unknown method '" + method + "'");
    }

    biaskit::save_csv(corrected, out);
    const auto dist = biaskit::class_distribution(corrected.labels);
    std::cout << "method: " << method << ", seed: " << seed << '\n';
    std::cout << "rows: " << ds.size() << " -> " << corrected.size() << '\n';
    std::cout << "imbalance ratio: " << dist.imbalance_ratio << '\n';
    std::cout << "corrected dataset written to " << out << '\n';
    return 0;
}

int run_weigh(const std::string& mode, const std::string& input, const std::string& target,
              const std::string& train_path, const std::string& test_path,
              const std::string& schema_path, const std::string& out,
              const biaskit::TreeParams& params, std::uint64_t seed) {
    const auto schema = load_schema(schema_path);
    biaskit::WeightVector wv;
    if (mode == "class") {
        if (input.empty()) {
            throw std::runtime_error("weigh --mode class requires --input");
        }
        if (!train_path.empty() || !test_path.empty()) {
            throw std::runtime_error("weigh --mode class conflicts with --train/--test");
        }
        const auto ds = biaskit::load_csv(input, schema);
        if (!ds.has_labels()) {
            throw std::runtime_error("weigh: schema declares no label column");
        }
        wv = biaskit::class_weights(ds.labels, resolve_target_proportions(target, ds.labels));
    } else if (mode == "importance") {
        if (train_path.empty() || test_path.empty()) {
            throw std::runtime_error("weigh --mode importance requires --train and --test");
        }
        if (!input.empty()) {
            throw std::runtime_error("weigh --mode importance conflicts with --input");
        }
        const auto train = biaskit::load_csv(train_path, schema);
        const auto test = biaskit::load_csv(test_path, schema);
        wv = biaskit::importance_weights(train, test, params, seed);
    } else {
        throw std::runtime_error("weigh: unknown mode '" + mode + "'");
    }

    biaskit::write_weights_csv(wv.weights, out);
    double mean = 0.0;
    for (double w : wv.weights) mean += w;
    mean /= static_cast<double>(wv.weights.size());
    std::cout << "mode: " << mode << ", weights: " << wv.weights.size() << ", mean: " << mean
              << '\n';
    std::cout << "weights written to " << out << '\n';
    return 0;
}

int run_roc(const std::string& predictions, const std::string& out, const std::string& report_out,
            std::uint64_t seed) {
    const PredictionFile preds = load_predictions(predictions);
    const auto curve = biaskit::roc_curve(preds.scores, preds.labels);
    const double area = biaskit::auc(curve);

    std::vector<int> decisions;
    decisions.reserve(preds.scores.size());
    for (double s : preds.scores) decisions.push_back(s >= 0.5 ? 1 : 0);
    const double mcc_at_half = biaskit::mcc(biaskit::confusion(decisions, preds.labels));

    biaskit::write_roc_csv(curve, out);

    if (!report_out.empty()) {
        json config;
        config["predictions"] = predictions;
        config["out"] = out;
        config["report"] = report_out;
        json summary;
        summary["auc"] = area;
        summary["mcc_at_0.5"] = mcc_at_half;
        summary["n"] = preds.scores.size();
        write_report(report_out, "roc", seed, config,
                     {{predictions, fnv1a64_hex(predictions)}}, summary);
    }

    std::cout << "auc: " << area << '\n';
    std::cout << "mcc at threshold 0.5: " << mcc_at_half << '\n';
    std::cout << "roc points written to " << out << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"biaskit: dataset bias audits and corrections"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags like --seed may follow the subcommand

    std::uint64_t seed = 42;
    app.add_option("--seed", seed, "seed for every randomized step")
        ->envname("BIASKIT_SEED")
        ->capture_default_str();

    biaskit::TreeParams params;

    // audit-imbalance
    auto* audit = app.add_subcommand("audit-imbalance", "report the class mix of a dataset");
    std::string audit_input, audit_schema, audit_out;
    audit->add_option("--input", audit_input, "labeled CSV dataset")->required();
    audit->add_option("--schema", audit_schema, "schema JSON")->required();
    audit->add_option("--out", audit_out, "report JSON path (stdout summary only if omitted)");

    // detect-shift
    auto* detect = app.add_subcommand("detect-shift",
                                      "measure covariate shift between two datasets");
    std::string ds_train, ds_test, ds_schema, ds_out, ds_tree_out;
    std::size_t ds_folds = 5;
    std::size_t ds_bins = 10;
    detect->add_option("--train", ds_train, "training CSV")->required();
    detect->add_option("--test", ds_test, "test CSV")->required();
    detect->add_option("--schema", ds_schema, "schema JSON")->required();
    detect->add_option("--out", ds_out, "report JSON path (stdout summary only if omitted)");
    detect->add_option("--tree-out", ds_tree_out, "also write the discriminator tree JSON");
    detect->add_option("--folds", ds_folds, "cross-validation folds")->capture_default_str();
    detect->add_option("--bins", ds_bins, "histogram bins for per-feature KL")
        ->capture_default_str();
    detect->add_option("--max-depth", params.max_depth, "tree depth limit")
        ->capture_default_str();
    detect->add_option("--min-samples-split", params.min_samples_split,
                       "minimum node size to split")
        ->capture_default_str();
    detect->add_option("--min-impurity-decrease", params.min_impurity_decrease,
                       "minimum Gini decrease to split")
        ->capture_default_str();

    // resample
    auto* resample = app.add_subcommand("resample", "rebalance a dataset by sampling");
    std::string rs_input, rs_schema, rs_method, rs_target = "uniform", rs_out;
    std::size_t rs_k = 5;
    resample->add_option("--input", rs_input, "labeled CSV dataset")->required();
    resample->add_option("--schema", rs_schema, "schema JSON")->required();
    resample->add_option("--method", rs_method, "undersample | oversample | smote")->required();
    resample->add_option("--target", rs_target,
                         "smote target: 'uniform' or JSON file of class counts")
        ->capture_default_str();
    resample->add_option("--k", rs_k, "smote neighbor count")->capture_default_str();
    resample->add_option("--out", rs_out, "corrected CSV path")->required();

    // weigh
    auto* weigh = app.add_subcommand("weigh", "compute per-example correction weights");
    std::string w_mode, w_input, w_target = "uniform", w_train, w_test, w_schema, w_out;
    weigh->add_option("--mode", w_mode, "class | importance")->required();
    weigh->add_option("--input", w_input, "labeled CSV (class mode)");
    weigh->add_option("--target", w_target, "'uniform' or JSON file of class proportions")
        ->capture_default_str();
    weigh->add_option("--train", w_train, "training CSV (importance mode)");
    weigh->add_option("--test", w_test, "test CSV (importance mode)");
    weigh->add_option("--schema", w_schema, "schema JSON")->required();
    weigh->add_option("--out", w_out, "weights CSV path")->required();
    weigh->add_option("--max-depth", params.max_depth, "tree depth limit")
        ->capture_default_str();
    weigh->add_option("--min-samples-split", params.min_samples_split,
                      "minimum node size to split")
        ->capture_default_str();

    // roc
    auto* roc = app.add_subcommand("roc", "ROC curve and AUC/MCC from a predictions file");
    std::string roc_predictions, roc_out, roc_report;
    roc->add_option("--predictions", roc_predictions, "CSV with 'score' and 'label' columns")
        ->required();
    roc->add_option("--out", roc_out, "ROC points CSV path")->required();
    roc->add_option("--report", roc_report, "optional JSON summary path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (audit->parsed()) {
            return run_audit_imbalance(audit_input, audit_schema, audit_out, seed);
        }
        if (detect->parsed()) {
            return run_detect_shift(ds_train, ds_test, ds_schema, ds_out, ds_tree_out, ds_folds,
                                    ds_bins, params, seed);
        }
        if (resample->parsed()) {
            return run_resample(rs_input, rs_schema, rs_method, rs_target, rs_k, rs_out, seed);
        }
        if (weigh->parsed()) {
            return run_weigh(w_mode, w_input, w_target, w_train, w_test, w_schema, w_out, params,
                             seed);
        }
        if (roc->parsed()) {
            return run_roc(roc_predictions, roc_out, roc_report, seed);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitValidation;
}
