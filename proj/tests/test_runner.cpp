#include "cyclonids/errors.hpp"
#include "cyclonids/runner.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace cyclonids;
namespace fs = std::filesystem;

namespace {

ExperimentConfig synthetic(double sep, std::size_t noise, std::uint64_t seed = 42) {
    ExperimentConfig c;
    c.synth = SynthConfig{500, 3, noise, 2, sep, seed};
    c.forest.n_trees = 50;
    return c;
}

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("cyclonids_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string without_timings(const std::string& report) {
    auto j = nlohmann::json::parse(report);
    j.erase("timings");
    j["selector_report"].erase("elapsed_seconds");
    return j.dump();
}

// A small table in the UGRansome layout whose label follows the protocol and port.
std::string ugransome_like(std::size_t rows) {
    const char* labels[] = {"S", "SS", "A"};
    const char* protocols[] = {"TCP", "UDP", "ICMP"};
    std::string s;
    for (std::size_t i = 0; i < rows; ++i) {
        const std::size_t c = i % 3;
        s += std::string(labels[c]) + ",Fam" + std::to_string(i % 4) + "," + std::to_string(1.0 + i % 7) + "," +
             std::to_string(100 + i % 11) + "," + std::to_string(i % 5) + ",seed" + std::to_string(i % 9) + ",exp" +
             std::to_string(i % 6) + "," + std::to_string(5060 + c) + ",Bonet," + std::to_string(1000 + 13 * i) +
             ",A,AF," + protocols[c] + "," + std::to_string(i % 50) + "\n";
    }
    return s;
}

} // namespace

TEST_CASE("separable synthetic data scores high") {
    auto cfg = synthetic(10.0, 2);
    CHECK(run_experiment(cfg).evaluation.accuracy >= 0.95);
    cfg.classifier = ClassifierKind::svm;
    CHECK(run_experiment(cfg).evaluation.accuracy >= 0.95);
}

TEST_CASE("boruta trims noise without hurting accuracy") {
    auto plain = synthetic(5.0, 20);
    auto selected = plain;
    selected.selector = SelectorKind::boruta;
    selected.boruta.max_iterations = 20;
    selected.boruta.forest.n_trees = 50;
    const auto a = run_experiment(plain);
    const auto b = run_experiment(selected);
    CHECK(b.selected_features.size() < a.selected_features.size());
    CHECK(std::abs(a.evaluation.accuracy - b.evaluation.accuracy) <= 0.03);
}

TEST_CASE("pca path emits component scores") {
    auto cfg = synthetic(3.0, 5);
    cfg.selector = SelectorKind::pca;
    cfg.pca_threshold = 0.9;
    const auto rec = run_experiment(cfg);
    CHECK(rec.selector.components >= 1);
    CHECK(rec.selector.components <= 8);
    CHECK(rec.selected_features.front() == "PC1");
    CHECK(rec.selector.salience.size() == 8);
}

TEST_CASE("stage timings are positive") {
    for (auto sel : {SelectorKind::none, SelectorKind::boruta, SelectorKind::pca}) {
        auto cfg = synthetic(5.0, 3);
        cfg.selector = sel;
        cfg.boruta.max_iterations = 3;
        cfg.boruta.forest.n_trees = 10;
        const auto rec = run_experiment(cfg);
        std::vector<std::string> stages;
        for (const auto& t : rec.timings) {
            stages.push_back(t.stage);
            CHECK(t.seconds > 0.0);
        }
        CHECK(stages == std::vector<std::string>{"load", "split", "encode", "standardize", "select", "train",
                                                 "predict", "evaluate"});
    }
}

TEST_CASE("test rows never influence fitted components") {
    const std::string text = ugransome_like(120);
    const auto schema = ugransome_schema();
    const auto raw = parse_csv(text, schema);
    const auto split = split_indices(raw.rows(), 0.2, 42);
    RawDataset altered = raw;
    for (auto i : split.test) {
        for (auto& col : altered.columns) {
            if (col.kind == ColumnKind::numeric) col.numbers[i] = col.numbers[i] * -1000.0 + 7.0;
            else col.tokens[i] = "never-seen";
        }
        altered.labels[i] = (altered.labels[i] + 1) % 3;
    }
    for (auto sel : {SelectorKind::none, SelectorKind::boruta, SelectorKind::pca}) {
        for (auto cls : {ClassifierKind::rf, ClassifierKind::svm}) {
            ExperimentConfig cfg;
            cfg.schema = SchemaId::ugransome;
            cfg.data_path = "inline";
            cfg.selector = sel;
            cfg.classifier = cls;
            cfg.forest.n_trees = 20;
            cfg.boruta.max_iterations = 5;
            cfg.boruta.forest.n_trees = 20;
            const auto a = run_on_split(cfg, raw, split);
            const auto b = run_on_split(cfg, altered, split);
            CHECK(a.fitted_components == b.fitted_components);
            CHECK_FALSE(a.fitted_components.empty());
        }
    }
}

TEST_CASE("identical configs give identical reports apart from timings") {
    auto cfg = synthetic(4.0, 4);
    cfg.selector = SelectorKind::boruta;
    cfg.boruta.max_iterations = 8;
    cfg.boruta.forest.n_trees = 20;
    const auto a = report_json(run_experiment(cfg));
    const auto b = report_json(run_experiment(cfg));
    CHECK(without_timings(a) == without_timings(b));
    const auto j = nlohmann::json::parse(a);
    for (const char* key : {"config", "selected_features", "selector_report", "confusion_matrix", "per_class_metrics",
                            "accuracy", "macro_precision", "macro_recall", "macro_f1", "timings", "seed", "versions"})
        CHECK(j.contains(key));
    CHECK(j["seed"] == 42);
    CHECK(j["metrics_scope"] == "test_split");
}

TEST_CASE("reports on disk") {
    auto cfg = synthetic(12.0, 1);
    cfg.selector = SelectorKind::boruta;
    cfg.boruta.max_iterations = 10;
    cfg.boruta.forest.n_trees = 20;
    const auto rec = run_experiment(cfg);
    REQUIRE(rec.evaluation.accuracy == 1.0);
    const auto dir = scratch("reports");
    const auto files = emit_reports(rec, dir);
    for (const auto& f : files) CHECK(fs::exists(f));
    CHECK(fs::exists(dir / "charts" / "class_distribution.svg"));
    CHECK(fs::exists(dir / "charts" / "boruta_hits.svg"));
    for (const auto& e : fs::directory_iterator(dir)) CHECK(e.path().extension() != ".tmp");

    const auto selector = slurp(dir / "selector.csv");
    CHECK(selector.rfind("dataset,elapsed_seconds,iterations,confirmed,tentative,rejected\n", 0) == 0);

    std::istringstream conf(slurp(dir / "confusion.csv"));
    std::string line;
    std::getline(conf, line);
    CHECK(line == "actual\\predicted,c0,c1");
    std::getline(conf, line);
    CHECK(line.rfind("c0,", 0) == 0);
    CHECK(line.substr(line.rfind(',')) == ",0");
    std::getline(conf, line);
    CHECK(line.rfind("c1,0,", 0) == 0);
    fs::remove_all(dir);
}

TEST_CASE("pca reports rank salience") {
    auto cfg = synthetic(3.0, 2);
    cfg.selector = SelectorKind::pca;
    const auto rec = run_experiment(cfg);
    const auto csv = selector_csv(rec);
    CHECK(csv.rfind("rank,feature,salience\n1,", 0) == 0);
    const auto dir = scratch("pca");
    emit_reports(rec, dir);
    CHECK(fs::exists(dir / "charts" / "salience.svg"));
    fs::remove_all(dir);
}

TEST_CASE("comparison ranks the separable dataset first") {
    auto easy = synthetic(10.0, 2);
    easy.name = "easy";
    auto hard = synthetic(0.0, 2);
    hard.name = "hard";
    const auto rows = compare_datasets({hard, easy});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].dataset == "easy");
    CHECK(compare_datasets({easy}).size() == 1);
    const auto csv = comparison_csv(rows);
    CHECK(csv.find("\neasy,none,rf,") != std::string::npos);
}

TEST_CASE("cross validation folds partition the rows") {
    const auto folds = fold_indices(103, 5, 42);
    std::vector<int> seen(103, 0);
    for (const auto& f : folds) {
        CHECK(f.train.size() + f.test.size() == 103);
        for (auto i : f.test) ++seen[i];
    }
    for (int s : seen) CHECK(s == 1);
    auto cfg = synthetic(6.0, 2);
    cfg.forest.n_trees = 10;
    CHECK(run_cross_validation(cfg, 3).size() == 3);
    CHECK_THROWS_AS(fold_indices(10, 1, 1), ConfigError);
}

TEST_CASE("categorical data through the full pipeline") {
    const auto path = scratch("ugr.csv");
    {
        std::ofstream out(path);
        out << ugransome_like(150);
    }
    ExperimentConfig cfg;
    cfg.schema = SchemaId::ugransome;
    cfg.data_path = path;
    cfg.forest.n_trees = 30;
    for (auto sel : {SelectorKind::none, SelectorKind::pca}) {
        for (auto cls : {ClassifierKind::rf, ClassifierKind::svm}) {
            cfg.selector = sel;
            cfg.classifier = cls;
            const auto rec = run_experiment(cfg);
            CHECK(rec.class_names == std::vector<std::string>{"Signature", "SyntheticSignature", "Anomaly"});
            CHECK(rec.n_test == 30);
            CHECK(rec.evaluation.accuracy > 0.9);
            CHECK(rec.categorical_counts.at("Protocol").at("TCP") == 50);
        }
    }
    fs::remove(path);
}

TEST_CASE("config errors") {
    ExperimentConfig cfg;
    cfg.test_fraction = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    ExperimentConfig missing;
    missing.schema = SchemaId::kdd99;
    CHECK_THROWS_AS(missing.validate(), ConfigError);
    CHECK_THROWS_AS(parse_selector("lasso"), ConfigError);
    CHECK_THROWS_AS(parse_classifier("knn"), ConfigError);
    ExperimentConfig absent;
    absent.schema = SchemaId::kdd99;
    absent.data_path = "/nonexistent/kdd.csv";
    CHECK_THROWS_AS(run_experiment(absent), DataError);
}

TEST_CASE("encoding defaults") {
    ExperimentConfig cfg;
    CHECK(cfg.effective_encoding() == EncodingStrategy::ordinal);
    cfg.classifier = ClassifierKind::svm;
    CHECK(cfg.effective_encoding() == EncodingStrategy::onehot);
    cfg.classifier = ClassifierKind::rf;
    cfg.selector = SelectorKind::pca;
    CHECK(cfg.effective_encoding() == EncodingStrategy::onehot);
}

TEST_CASE("svg chart escapes labels") {
    const auto svg = svg_bar_chart("a<b", {"x&y", "z"}, {1.0, 2.0});
    CHECK(svg.find("a&lt;b") != std::string::npos);
    CHECK(svg.find("x&amp;y") != std::string::npos);
    CHECK(svg.rfind("<svg", 0) == 0);
}
