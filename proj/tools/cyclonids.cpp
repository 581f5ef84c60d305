#include "cyclonids/errors.hpp"
#include "cyclonids/io.hpp"
#include "cyclonids/runner.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace cyclonids;

namespace {

// Raw option values; resolved into an ExperimentConfig after parsing.
struct RunOptions {
    std::string name;
    std::string schema = "synthetic";
    std::string data;
    std::string synth;
    std::string selector = "none";
    std::string classifier = "rf";
    std::string encoding;
    std::uint64_t seed = 42;
    double test_fraction = 0.2;
    std::size_t max_levels = 100;
    std::size_t rf_trees = 100;
    std::optional<std::uint64_t> rf_seed;
    std::size_t rf_max_depth = 0;
    double svm_c = 1.0;
    std::size_t svm_epochs = 1000;
    std::size_t boruta_max_iter = 100;
    double boruta_alpha = 0.05;
    std::size_t boruta_trees = 100;
    double pca_threshold = 0.95;
};

void add_run_options(CLI::App& app, RunOptions& o) {
    app.add_option("--name", o.name, "Label used in comparison tables");
    app.add_option("--schema", o.schema, "kdd99 | nslkdd | ugransome | synthetic")->capture_default_str();
    app.add_option("--data", o.data, "Input CSV file");
    app.add_option("--synth", o.synth, "Synthetic generator: n=,inf=,noise=,classes=,sep=,seed=");
    app.add_option("--selector", o.selector, "none | boruta | pca")->capture_default_str();
    app.add_option("--classifier", o.classifier, "rf | svm")->capture_default_str();
    app.add_option("--encoding", o.encoding, "onehot | ordinal (default depends on the pipeline)");
    app.add_option("--max-levels", o.max_levels, "One-hot level cap per categorical column")->capture_default_str();
    app.add_option("--seed", o.seed, "Split and selector seed")->capture_default_str();
    app.add_option("--test-fraction", o.test_fraction, "Holdout fraction")->capture_default_str();
    app.add_option("--rf-trees", o.rf_trees, "Random Forest size")->capture_default_str();
    app.add_option("--rf-seed", o.rf_seed, "Random Forest seed (defaults to --seed)");
    app.add_option("--rf-max-depth", o.rf_max_depth, "Tree depth limit, 0 = unlimited")->capture_default_str();
    app.add_option("--svm-c", o.svm_c, "SVM regularization C")->capture_default_str();
    app.add_option("--svm-epochs", o.svm_epochs, "SVM epoch cap")->capture_default_str();
    app.add_option("--boruta-max-iter", o.boruta_max_iter, "Boruta iteration cap")->capture_default_str();
    app.add_option("--boruta-alpha", o.boruta_alpha, "Boruta significance level")->capture_default_str();
    app.add_option("--boruta-trees", o.boruta_trees, "Trees per Boruta forest")->capture_default_str();
    app.add_option("--pca-threshold", o.pca_threshold, "Cumulative explained variance cutoff")->capture_default_str();
}

ExperimentConfig to_config(const RunOptions& o) {
    ExperimentConfig c;
    c.name = o.name;
    c.schema = parse_schema_id(o.schema);
    c.data_path = o.data;
    if (!o.synth.empty()) c.synth = parse_synth_config(o.synth);
    c.selector = parse_selector(o.selector);
    c.classifier = parse_classifier(o.classifier);
    if (o.encoding == "onehot") c.encoding = EncodingStrategy::onehot;
    else if (o.encoding == "ordinal") c.encoding = EncodingStrategy::ordinal;
    else if (!o.encoding.empty()) throw ConfigError("unknown encoding '" + o.encoding + "'");
    c.max_onehot_levels = o.max_levels;
    c.seed = o.seed;
    c.test_fraction = o.test_fraction;
    c.forest.n_trees = o.rf_trees;
    c.forest.max_depth = o.rf_max_depth;
    c.forest_seed = o.rf_seed;
    c.svm.c = o.svm_c;
    c.svm.max_epochs = o.svm_epochs;
    c.boruta.max_iterations = o.boruta_max_iter;
    c.boruta.alpha = o.boruta_alpha;
    c.boruta.forest.n_trees = o.boruta_trees;
    c.pca_threshold = o.pca_threshold;
    c.validate();
    return c;
}

void print_summary(const RunRecord& rec) {
    std::printf("%s selector=%s classifier=%s train=%zu test=%zu features=%zu accuracy=%.4f macro_f1=%.4f\n",
                rec.config.label().c_str(), std::string(to_string(rec.config.selector)).c_str(),
                std::string(to_string(rec.config.classifier)).c_str(), rec.n_train, rec.n_test,
                rec.selected_features.size(), rec.evaluation.accuracy, rec.evaluation.macro.f1);
    if (rec.selector.boruta) {
        const auto& b = *rec.selector.boruta;
        std::printf("boruta iterations=%zu confirmed=%zu tentative=%zu rejected=%zu elapsed=%.3fs\n",
                    b.iterations_used, b.count(FeatureDecision::confirmed), b.count(FeatureDecision::tentative),
                    b.count(FeatureDecision::rejected), b.elapsed.count());
    }
    if (rec.config.selector == SelectorKind::pca) std::printf("pca components=%zu\n", rec.selector.components);
}

int cmd_run(const RunOptions& o, const std::string& out, std::size_t folds) {
    const ExperimentConfig cfg = to_config(o);
    if (folds > 1) {
        const auto runs = run_cross_validation(cfg, folds);
        std::string csv = "fold,accuracy,macro_precision,macro_recall,macro_f1\n";
        double mean = 0.0;
        for (std::size_t f = 0; f < runs.size(); ++f) {
            const auto& ev = runs[f].evaluation;
            char buf[160];
            std::snprintf(buf, sizeof buf, "%zu,%.10g,%.10g,%.10g,%.10g\n", f + 1, ev.accuracy, ev.macro.precision,
                          ev.macro.recall, ev.macro.f1);
            csv += buf;
            mean += ev.accuracy;
            print_summary(runs[f]);
            if (!out.empty()) emit_reports(runs[f], std::filesystem::path(out) / ("fold-" + std::to_string(f + 1)));
        }
        std::printf("mean accuracy over %zu folds: %.4f\n", runs.size(), mean / static_cast<double>(runs.size()));
        if (!out.empty()) write_file_atomic(std::filesystem::path(out) / "folds.csv", csv);
        return 0;
    }
    const RunRecord rec = run_experiment(cfg);
    print_summary(rec);
    if (!out.empty())
        for (const auto& p : emit_reports(rec, out)) std::printf("wrote %s\n", p.string().c_str());
    return 0;
}

int cmd_compare(const std::string& config_path, const std::string& out) {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot open config file " + config_path);
    std::vector<ExperimentConfig> configs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        RunOptions o;
        CLI::App sub{"experiment line"};
        add_run_options(sub, o);
        try {
            sub.parse(line, false);
        } catch (const CLI::ParseError& e) {
            throw ConfigError(config_path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        configs.push_back(to_config(o));
    }
    if (configs.empty()) throw ConfigError("config file " + config_path + " lists no experiments");
    const std::string csv = comparison_csv(compare_datasets(configs));
    if (out.empty()) std::cout << csv;
    else write_file_atomic(out, csv);
    return 0;
}

int cmd_gen(const std::string& synth, const std::string& out) {
    SynthConfig cfg = synth.empty() ? SynthConfig{} : parse_synth_config(synth);
    cfg.validate();
    const auto result = gen_classification(cfg);
    if (out.empty()) std::cout << to_csv(result.data);
    else write_csv(result.data, out);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Intrusion detection pipeline: Boruta/PCA feature selection with Random Forest and SVM"};
    app.require_subcommand(1);

    RunOptions run_opts;
    std::string run_out;
    std::size_t folds = 1;
    auto* run = app.add_subcommand("run", "Run one experiment and write its reports");
    add_run_options(*run, run_opts);
    run->add_option("--out", run_out, "Output directory");
    run->add_option("--folds", folds, "k-fold cross-validation instead of the holdout split")->capture_default_str();

    std::string compare_config;
    std::string compare_out;
    auto* compare = app.add_subcommand("compare", "Run every experiment listed in a config file");
    compare->add_option("--config", compare_config, "One line of run options per experiment")->required();
    compare->add_option("--out", compare_out, "Comparison CSV path (stdout when omitted)");

    std::string gen_synth;
    std::string gen_out;
    auto* gen = app.add_subcommand("gen", "Write a synthetic classification dataset as CSV");
    gen->add_option("--synth", gen_synth, "n=,inf=,noise=,classes=,sep=,seed=");
    gen->add_option("--out", gen_out, "CSV path (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) return cmd_run(run_opts, run_out, folds);
        if (compare->parsed()) return cmd_compare(compare_config, compare_out);
        return cmd_gen(gen_synth, gen_out);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const DataError& e) {
        if (e.row() > 0) std::fprintf(stderr, "data error (row %zu): %s\n", e.row(), e.what());
        else std::fprintf(stderr, "data error: %s\n", e.what());
        return 3;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    }
}
