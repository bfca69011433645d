// Exercises the installed command-line surface end to end: exit codes, file
// outputs, report schemas and byte-level determinism.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

#include "biaskit/biaskit.hpp"

#include "test_util.hpp"

using namespace biaskit;
using nlohmann::json;
using testutil::TempDir;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(BIASKIT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

void write_schema(const std::filesystem::path& path, const FeatureSchema& schema) {
    std::ofstream out(path);
    out << schema_to_json(schema).dump(2) << '\n';
}

FeatureSchema mixture_schema_2d() {
    FeatureSchema schema;
    schema.columns.push_back({"x0", ColumnKind::continuous, {}});
    schema.columns.push_back({"x1", ColumnKind::continuous, {}});
    schema.columns.push_back({"label", ColumnKind::categorical, {"big", "small"}});
    schema.label_column = "label";
    return schema;
}

Dataset imbalanced_fixture(std::size_t n_big, std::size_t n_small, std::uint64_t seed) {
    MixtureSpec spec;
    spec.seed = seed;
    spec.components.push_back({{0.0, 0.0}, {1.0, 1.0}, "big", n_big});
    spec.components.push_back({{3.0, 3.0}, {1.0, 1.0}, "small", n_small});
    return generate_mixture(spec);
}

}  // namespace

TEST_CASE("audit-imbalance reproduces the 999/1 ratio") {
    TempDir tmp;
    const Dataset ds = imbalanced_fixture(999, 1, 5);
    save_csv(ds, tmp.file("data.csv"));
    write_schema(tmp.file("schema.json"), ds.schema);

    const int rc = run_cli("audit-imbalance --input " + tmp.file("data.csv").string() +
                           " --schema " + tmp.file("schema.json").string() + " --out " +
                           tmp.file("report.json").string());
    REQUIRE(rc == 0);

    std::ifstream in(tmp.file("report.json"));
    const json j = json::parse(in);
    CHECK(j.at("command") == "audit-imbalance");
    CHECK(j.at("seed").get<std::uint64_t>() == 42);
    CHECK(j.at("report").at("imbalance_ratio").get<double>() == doctest::Approx(999.0));
    CHECK(j.at("report").at("class_counts").at("big").get<std::size_t>() == 999);
    CHECK(j.contains("inputs"));
    CHECK(j.at("config").contains("input"));
}

TEST_CASE("detect-shift on same-distribution fixtures says none") {
    TempDir tmp;
    const Dataset train = imbalanced_fixture(500, 500, 11);
    const Dataset test = imbalanced_fixture(500, 500, 12);
    save_csv(train, tmp.file("a.csv"));
    save_csv(test, tmp.file("b.csv"));
    write_schema(tmp.file("s.json"), train.schema);

    const int rc = run_cli("detect-shift --train " + tmp.file("a.csv").string() + " --test " +
                           tmp.file("b.csv").string() + " --schema " + tmp.file("s.json").string() +
                           " --folds 5 --seed 7 --out " + tmp.file("shift.json").string() +
                           " --tree-out " + tmp.file("tree.json").string());
    REQUIRE(rc == 0);

    std::ifstream in(tmp.file("shift.json"));
    const json j = json::parse(in);
    CHECK(j.at("seed").get<std::uint64_t>() == 7);
    CHECK(j.at("report").at("verdict") == "none");
    CHECK(j.at("report").at("fold_mccs").size() == 5);
    CHECK(j.at("report").at("n_train").get<std::size_t>() == 1000);

    // The serialized discriminator reloads.
    std::ifstream tin(tmp.file("tree.json"));
    const DecisionTree tree = tree_from_json(json::parse(tin));
    CHECK(tree.feature_columns.size() == 2);
}

TEST_CASE("detect-shift without --out prints the verdict and writes nothing") {
    TempDir tmp;
    const Dataset train = imbalanced_fixture(200, 200, 15);
    const Dataset test = imbalanced_fixture(200, 200, 16);
    save_csv(train, tmp.file("a.csv"));
    save_csv(test, tmp.file("b.csv"));
    write_schema(tmp.file("s.json"), train.schema);

    const std::string cmd = std::string(BIASKIT_CLI_PATH) + " detect-shift --train " +
                            tmp.file("a.csv").string() + " --test " + tmp.file("b.csv").string() +
                            " --schema " + tmp.file("s.json").string() +
                            " --folds 5 --seed 7 > " + tmp.file("stdout.txt").string() + " 2>&1";
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    const std::string out = testutil::read_file(tmp.file("stdout.txt"));
    CHECK(out.find("shift magnitude") != std::string::npos);
    CHECK(out.find("none") != std::string::npos);
}

TEST_CASE("resample smote to uniform balances the classes") {
    TempDir tmp;
    const Dataset ds = imbalanced_fixture(90, 10, 3);
    save_csv(ds, tmp.file("data.csv"));
    write_schema(tmp.file("schema.json"), ds.schema);

    const int rc = run_cli("resample --method smote --k 5 --target uniform --input " +
                           tmp.file("data.csv").string() + " --schema " +
                           tmp.file("schema.json").string() + " --out " +
                           tmp.file("out.csv").string());
    REQUIRE(rc == 0);

    const Dataset out = load_csv(tmp.file("out.csv"), ds.schema);
    std::map<std::string, std::size_t> counts;
    for (const auto& y : out.labels) ++counts[y];
    CHECK(counts.at("big") == 90);
    CHECK(counts.at("small") == 90);
}

TEST_CASE("resample undersample and oversample") {
    TempDir tmp;
    const Dataset ds = imbalanced_fixture(60, 20, 4);
    save_csv(ds, tmp.file("data.csv"));
    write_schema(tmp.file("schema.json"), ds.schema);

    REQUIRE(run_cli("resample --method undersample --input " + tmp.file("data.csv").string() +
                    " --schema " + tmp.file("schema.json").string() + " --out " +
                    tmp.file("under.csv").string()) == 0);
    const Dataset under = load_csv(tmp.file("under.csv"), ds.schema);
    CHECK(under.size() == 40);

    REQUIRE(run_cli("resample --method oversample --input " + tmp.file("data.csv").string() +
                    " --schema " + tmp.file("schema.json").string() + " --out " +
                    tmp.file("over.csv").string()) == 0);
    const Dataset over = load_csv(tmp.file("over.csv"), ds.schema);
    CHECK(over.size() == 120);
}

TEST_CASE("weigh class mode writes the expected ratios") {
    TempDir tmp;
    const Dataset ds = imbalanced_fixture(90, 10, 6);
    save_csv(ds, tmp.file("data.csv"));
    write_schema(tmp.file("schema.json"), ds.schema);

    const int rc = run_cli("weigh --mode class --target uniform --input " +
                           tmp.file("data.csv").string() + " --schema " +
                           tmp.file("schema.json").string() + " --out " +
                           tmp.file("weights.csv").string());
    REQUIRE(rc == 0);

    std::ifstream in(tmp.file("weights.csv"));
    std::string line;
    std::getline(in, line);
    CHECK(line == "weight");
    std::vector<double> weights;
    while (std::getline(in, line)) {
        if (!line.empty()) weights.push_back(std::stod(line));
    }
    REQUIRE(weights.size() == ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const double expected = ds.labels[i] == "big" ? 5.0 / 9.0 : 5.0;
        CHECK(weights[i] == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("weigh importance mode produces positive weights") {
    TempDir tmp;
    const Dataset train = imbalanced_fixture(300, 300, 13);
    const Dataset test = imbalanced_fixture(300, 300, 14);
    save_csv(train, tmp.file("a.csv"));
    save_csv(test, tmp.file("b.csv"));
    write_schema(tmp.file("s.json"), train.schema);

    const int rc = run_cli("weigh --mode importance --train " + tmp.file("a.csv").string() +
                           " --test " + tmp.file("b.csv").string() + " --schema " +
                           tmp.file("s.json").string() + " --out " +
                           tmp.file("w.csv").string());
    REQUIRE(rc == 0);

    std::ifstream in(tmp.file("w.csv"));
    std::string line;
    std::getline(in, line);
    std::size_t n = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        CHECK(std::stod(line) > 0.0);
        ++n;
    }
    CHECK(n == train.size());
}

TEST_CASE("roc command emits points and a summary report") {
    TempDir tmp;
    testutil::write_file(tmp.file("preds.csv"),
                         "score,label\n0.9,1\n0.8,0\n0.7,1\n0.1,0\n");
    const int rc = run_cli("roc --predictions " + tmp.file("preds.csv").string() + " --out " +
                           tmp.file("roc.csv").string() + " --report " +
                           tmp.file("roc.json").string());
    REQUIRE(rc == 0);

    const std::string points = testutil::read_file(tmp.file("roc.csv"));
    CHECK(points.find("fpr,tpr") == 0);
    CHECK(points.find("0.5,1") != std::string::npos);

    std::ifstream in(tmp.file("roc.json"));
    const json j = json::parse(in);
    CHECK(j.at("report").at("auc").get<double>() == doctest::Approx(0.75));
}

TEST_CASE("identical command lines give byte-identical reports") {
    TempDir tmp;
    const Dataset train = imbalanced_fixture(200, 100, 21);
    const Dataset test = imbalanced_fixture(100, 200, 22);
    save_csv(train, tmp.file("a.csv"));
    save_csv(test, tmp.file("b.csv"));
    write_schema(tmp.file("s.json"), train.schema);

    const std::string base = "detect-shift --train " + tmp.file("a.csv").string() + " --test " +
                             tmp.file("b.csv").string() + " --schema " +
                             tmp.file("s.json").string() + " --folds 4 --seed 99 --out ";
    REQUIRE(run_cli(base + tmp.file("r1.json").string()) == 0);
    REQUIRE(run_cli(base + tmp.file("r2.json").string()) == 0);

    std::string r1 = testutil::read_file(tmp.file("r1.json"));
    std::string r2 = testutil::read_file(tmp.file("r2.json"));
    // The only allowed difference is the embedded output path.
    const std::string p1 = tmp.file("r1.json").string();
    const std::string p2 = tmp.file("r2.json").string();
    std::size_t at;
    while ((at = r1.find(p1)) != std::string::npos) r1.replace(at, p1.size(), "OUT");
    while ((at = r2.find(p2)) != std::string::npos) r2.replace(at, p2.size(), "OUT");
    CHECK(r1 == r2);
    CHECK(!r1.empty());
}

TEST_CASE("input files are never mutated") {
    TempDir tmp;
    const Dataset ds = imbalanced_fixture(50, 25, 8);
    save_csv(ds, tmp.file("data.csv"));
    write_schema(tmp.file("schema.json"), ds.schema);
    const std::string before = testutil::read_file(tmp.file("data.csv"));

    REQUIRE(run_cli("resample --method undersample --input " + tmp.file("data.csv").string() +
                    " --schema " + tmp.file("schema.json").string() + " --out " +
                    tmp.file("out.csv").string()) == 0);
    CHECK(testutil::read_file(tmp.file("data.csv")) == before);
}

TEST_CASE("validation failures exit with status 2") {
    TempDir tmp;
    SUBCASE("unknown subcommand") {
        CHECK(run_cli("frobnicate") == 2);
    }
    SUBCASE("missing required flag") {
        CHECK(run_cli("audit-imbalance --input nowhere.csv") == 2);
    }
    SUBCASE("missing input file") {
        write_schema(tmp.file("s.json"), mixture_schema_2d());
        CHECK(run_cli("audit-imbalance --input " + tmp.file("nope.csv").string() + " --schema " +
                      tmp.file("s.json").string() + " --out " + tmp.file("r.json").string()) == 2);
    }
    SUBCASE("malformed csv") {
        testutil::write_file(tmp.file("bad.csv"), "x0,x1,label\n1.0,oops,big\n");
        write_schema(tmp.file("s.json"), mixture_schema_2d());
        CHECK(run_cli("audit-imbalance --input " + tmp.file("bad.csv").string() + " --schema " +
                      tmp.file("s.json").string() + " --out " + tmp.file("r.json").string()) == 2);
    }
    SUBCASE("unknown resample method") {
        const Dataset ds = imbalanced_fixture(10, 5, 9);
        save_csv(ds, tmp.file("d.csv"));
        write_schema(tmp.file("s.json"), ds.schema);
        CHECK(run_cli("resample --method tomek --input " + tmp.file("d.csv").string() +
                      " --schema " + tmp.file("s.json").string() + " --out " +
                      tmp.file("o.csv").string()) == 2);
    }
    SUBCASE("conflicting weigh flags") {
        const Dataset ds = imbalanced_fixture(10, 5, 9);
        save_csv(ds, tmp.file("d.csv"));
        write_schema(tmp.file("s.json"), ds.schema);
        CHECK(run_cli("weigh --mode class --input " + tmp.file("d.csv").string() + " --train " +
                      tmp.file("d.csv").string() + " --schema " + tmp.file("s.json").string() +
                      " --out " + tmp.file("w.csv").string()) == 2);
    }
}

TEST_CASE("BIASKIT_SEED env var sets the default seed, flag wins") {
    TempDir tmp;
    const Dataset ds = imbalanced_fixture(30, 10, 10);
    save_csv(ds, tmp.file("data.csv"));
    write_schema(tmp.file("schema.json"), ds.schema);

    const std::string tail = "audit-imbalance --input " + tmp.file("data.csv").string() +
                             " --schema " + tmp.file("schema.json").string() + " --out ";

    const std::string env_cmd = "BIASKIT_SEED=777 " + std::string(BIASKIT_CLI_PATH) + " " + tail +
                                tmp.file("env.json").string() + " >/dev/null 2>&1";
    REQUIRE(WEXITSTATUS(std::system(env_cmd.c_str())) == 0);
    std::ifstream in1(tmp.file("env.json"));
    CHECK(json::parse(in1).at("seed").get<std::uint64_t>() == 777);

    const std::string flag_cmd = "BIASKIT_SEED=777 " + std::string(BIASKIT_CLI_PATH) + " " + tail +
                                 tmp.file("flag.json").string() + " --seed 5 >/dev/null 2>&1";
    REQUIRE(WEXITSTATUS(std::system(flag_cmd.c_str())) == 0);
    std::ifstream in2(tmp.file("flag.json"));
    CHECK(json::parse(in2).at("seed").get<std::uint64_t>() == 5);
}
