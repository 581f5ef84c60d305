#pragma once

#include "cyclonids/boruta.hpp"
#include "cyclonids/dataset.hpp"
#include "cyclonids/forest.hpp"
#include "cyclonids/metrics.hpp"
#include "cyclonids/pca.hpp"
#include "cyclonids/preprocess.hpp"
#include "cyclonids/svm.hpp"
#include "cyclonids/synthgen.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cyclonids {

enum class SelectorKind { none, boruta, pca };
enum class ClassifierKind { rf, svm };

std::string_view to_string(SelectorKind s);
std::string_view to_string(ClassifierKind c);
SelectorKind parse_selector(std::string_view s);
ClassifierKind parse_classifier(std::string_view s);

struct ExperimentConfig {
    std::string name;  // label in comparison tables; defaults to the schema name
    SchemaId schema = SchemaId::synthetic;
    std::filesystem::path data_path;  // may be empty for synthetic data, which is then generated
    SynthConfig synth;

    SelectorKind selector = SelectorKind::none;
    BorutaConfig boruta;
    double pca_threshold = 0.95;

    ClassifierKind classifier = ClassifierKind::rf;
    ForestConfig forest;
    std::optional<std::uint64_t> forest_seed;  // defaults to `seed`
    SVMConfig svm;

    // Default: onehot when the SVM or PCA is involved, ordinal otherwise.
    std::optional<EncodingStrategy> encoding;
    std::size_t max_onehot_levels = 100;

    double test_fraction = 0.2;
    std::uint64_t seed = 42;
    std::filesystem::path output_dir;

    void validate() const;
    EncodingStrategy effective_encoding() const;
    std::string label() const;
};

struct SelectorReport {
    SelectorKind kind = SelectorKind::none;
    std::optional<BorutaResult> boruta;
    std::vector<FeatureSalience> salience;  // PCA: ranking over encoded input features
    std::vector<double> explained_variance_ratio;
    std::size_t components = 0;
    // Boruta confirmed nothing and the classifier fell back to a wider set.
    bool fallback = false;
};

struct StageTiming {
    std::string stage;
    double seconds = 0.0;
};

struct RunRecord {
    ExperimentConfig config;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    std::vector<std::string> class_names;
    std::vector<std::size_t> train_class_counts;
    std::vector<std::size_t> test_class_counts;
    std::map<std::string, std::map<std::string, std::size_t>> categorical_counts;
    std::vector<std::string> feature_names;  // after encoding
    std::vector<std::string> selected_features;
    SelectorReport selector;
    EvaluationReport evaluation;
    std::vector<StageTiming> timings;
    std::vector<double> forest_importance;  // rf only, over selected features
    // Text dump of every fitted component (encoder, standardizer, selector,
    // classifier); two runs fitted on the same training rows match exactly.
    std::string fitted_components;
    std::string model_text;  // serialized forest (rf) or weight table (svm)
};

// Loads (or generates) the raw table named by the config.
RawDataset load_experiment_data(const ExperimentConfig& cfg);

// Full pipeline on a fixed train/test partition of `raw`: encoder,
// standardizer, selector and classifier are all fitted on the train rows only.
RunRecord run_on_split(const ExperimentConfig& cfg, const RawDataset& raw, const SplitIndices& split,
                       double load_seconds = 0.0);

// load -> split(test_fraction, seed) -> run_on_split.
RunRecord run_experiment(const ExperimentConfig& cfg);

// k-fold extension of the holdout protocol; fold f is the test set of run f.
std::vector<RunRecord> run_cross_validation(const ExperimentConfig& cfg, std::size_t folds);
std::vector<SplitIndices> fold_indices(std::size_t n, std::size_t folds, std::uint64_t seed);

// report.json text: pretty-printed, keys sorted.
std::string report_json(const RunRecord& rec);
std::string confusion_csv(const RunRecord& rec);
std::string selector_csv(const RunRecord& rec);

// Writes report.json, confusion.csv, selector.csv, charts/*.svg (and model.txt)
// into `dir`, each via write-then-rename. Returns the written paths.
std::vector<std::filesystem::path> emit_reports(const RunRecord& rec, const std::filesystem::path& dir);

struct ComparisonRow {
    std::string dataset;
    SelectorKind selector = SelectorKind::none;
    ClassifierKind classifier = ClassifierKind::rf;
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    std::size_t selected_features = 0;
    std::size_t boruta_iterations = 0;
    std::size_t boruta_confirmed = 0;
    std::size_t boruta_rejected = 0;
    double selector_seconds = 0.0;
    double total_seconds = 0.0;
};

// Runs every config; rows sorted by accuracy, highest first (input order breaks ties).
std::vector<ComparisonRow> compare_datasets(const std::vector<ExperimentConfig>& configs);
std::string comparison_csv(const std::vector<ComparisonRow>& rows);

// Standalone SVG bar chart.
std::string svg_bar_chart(const std::string& title, const std::vector<std::string>& labels,
                          const std::vector<double>& values);

} // namespace cyclonids
