#include "cyclonids/runner.hpp"

#include "cyclonids/errors.hpp"
#include "cyclonids/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

namespace cyclonids {

std::string_view to_string(SelectorKind s) {
    switch (s) {
    case SelectorKind::none: return "none";
    case SelectorKind::boruta: return "boruta";
    case SelectorKind::pca: return "pca";
    }
    return "?";
}

std::string_view to_string(ClassifierKind c) { return c == ClassifierKind::rf ? "rf" : "svm"; }

SelectorKind parse_selector(std::string_view s) {
    if (s == "none") return SelectorKind::none;
    if (s == "boruta") return SelectorKind::boruta;
    if (s == "pca") return SelectorKind::pca;
    throw ConfigError("unknown selector '" + std::string(s) + "'");
}

ClassifierKind parse_classifier(std::string_view s) {
    if (s == "rf") return ClassifierKind::rf;
    if (s == "svm") return ClassifierKind::svm;
    throw ConfigError("unknown classifier '" + std::string(s) + "'");
}

void ExperimentConfig::validate() const {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ConfigError("test fraction must lie in (0, 1)");
    if (!(pca_threshold > 0.0 && pca_threshold <= 1.0)) throw ConfigError("PCA threshold must lie in (0, 1]");
    if (schema != SchemaId::synthetic && data_path.empty())
        throw ConfigError("schema " + std::string(to_string(schema)) + " needs a data file");
    if (schema == SchemaId::synthetic && data_path.empty()) synth.validate();
    if (selector == SelectorKind::boruta) boruta.validate();
    if (classifier == ClassifierKind::rf) forest.validate();
    else svm.validate();
}

EncodingStrategy ExperimentConfig::effective_encoding() const {
    if (encoding) return *encoding;
    return classifier == ClassifierKind::svm || selector == SelectorKind::pca ? EncodingStrategy::onehot
                                                                               : EncodingStrategy::ordinal;
}

std::string ExperimentConfig::label() const { return name.empty() ? std::string(to_string(schema)) : name; }

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

RawDataset to_raw(const Dataset& d) {
    RawDataset raw;
    raw.schema = d.schema;
    raw.class_names = d.class_names;
    raw.labels = d.labels;
    for (std::size_t j = 0; j < d.cols(); ++j) raw.columns.push_back({d.feature_names[j], ColumnKind::numeric, d.features.column(j), {}});
    return raw;
}

std::string dump_encoder(const Encoder& enc) {
    std::string s = "encoder " + std::string(to_string(enc.strategy())) + "\n";
    for (const auto& e : enc.encodings()) {
        s += e.column + ":";
        for (const auto& l : e.levels) s += " " + l;
        s += "\n";
    }
    return s;
}

std::string dump_standardizer(const Standardizer& st) {
    std::string s = "standardizer\n";
    for (std::size_t j = 0; j < st.size(); ++j)
        s += fmt(st.means[j]) + " " + fmt(st.stds[j]) + (st.zero_variance[j] ? " z\n" : "\n");
    return s;
}

std::string dump_svm(const SVMModel& m) {
    std::string s = "svm classes " + std::to_string(m.class_names.size()) + " features " +
                    std::to_string(m.n_features()) + "\n";
    for (std::size_t c = 0; c < m.class_names.size(); ++c) {
        s += m.class_names[c] + " bias " + fmt(m.biases[c]) + " weights";
        for (double w : m.weights.row(c)) s += " " + fmt(w);
        s += "\n";
    }
    return s;
}

} // namespace

RawDataset load_experiment_data(const ExperimentConfig& cfg) {
    if (cfg.schema == SchemaId::synthetic) {
        if (cfg.data_path.empty()) return to_raw(gen_classification(cfg.synth).data);
        return load_synthetic_csv(cfg.data_path);
    }
    return load_csv(cfg.data_path, schema_by_id(cfg.schema));
}

RunRecord run_on_split(const ExperimentConfig& cfg, const RawDataset& raw, const SplitIndices& split,
                       double load_seconds) {
    cfg.validate();
    RunRecord rec;
    rec.config = cfg;
    rec.class_names = raw.class_names;
    rec.categorical_counts = categorical_counts(raw);
    rec.timings.push_back({"load", load_seconds});

    auto t0 = Clock::now();
    const RawDataset raw_train = raw.select_rows(split.train);
    const RawDataset raw_test = raw.select_rows(split.test);
    rec.timings.push_back({"split", seconds_since(t0)});
    rec.n_train = raw_train.rows();
    rec.n_test = raw_test.rows();
    rec.train_class_counts = class_counts(raw_train.labels, rec.class_names.size());
    rec.test_class_counts = class_counts(raw_test.labels, rec.class_names.size());

    t0 = Clock::now();
    const Encoder encoder = Encoder::fit(raw_train, cfg.effective_encoding(), cfg.max_onehot_levels);
    Dataset train = encoder.apply(raw_train);
    Dataset test = encoder.apply(raw_test);
    train.validate();
    test.validate();
    rec.feature_names = train.feature_names;
    rec.timings.push_back({"encode", seconds_since(t0)});
    rec.fitted_components += dump_encoder(encoder);

    t0 = Clock::now();
    const Standardizer standardizer = fit_standardizer(train.features);
    train.features = transform(standardizer, train.features);
    test.features = transform(standardizer, test.features);
    rec.timings.push_back({"standardize", seconds_since(t0)});
    rec.fitted_components += dump_standardizer(standardizer);

    t0 = Clock::now();
    rec.selector.kind = cfg.selector;
    switch (cfg.selector) {
    case SelectorKind::none:
        rec.selected_features = train.feature_names;
        rec.fitted_components += "selector none\n";
        break;
    case SelectorKind::boruta: {
        BorutaConfig bcfg = cfg.boruta;
        bcfg.seed = cfg.seed;
        auto result = run_boruta(train, bcfg);
        std::vector<std::size_t> keep = result.confirmed();
        if (keep.empty()) {
            rec.selector.fallback = true;
            for (std::size_t j = 0; j < result.decisions.size(); ++j)
                if (result.decisions[j] == FeatureDecision::tentative) keep.push_back(j);
        }
        if (keep.empty()) {
            for (std::size_t j = 0; j < train.cols(); ++j) keep.push_back(j);
        }
        rec.fitted_components += "selector boruta iterations " + std::to_string(result.iterations_used) + "\n";
        for (std::size_t j = 0; j < result.decisions.size(); ++j)
            rec.fitted_components += train.feature_names[j] + " " + std::string(to_string(result.decisions[j])) +
                                     " " + std::to_string(result.hits[j]) + "\n";
        train = train.select_features(keep);
        test = test.select_features(keep);
        rec.selected_features = train.feature_names;
        rec.selector.boruta = std::move(result);
        break;
    }
    case SelectorKind::pca: {
        const PCAModel model = fit_pca(train.features);
        const std::size_t k = select_components(model, cfg.pca_threshold);
        rec.selector.components = k;
        rec.selector.explained_variance_ratio = model.explained_variance_ratio;
        rec.selector.salience = feature_salience(model);
        Dataset scored_train = train;
        Dataset scored_test = test;
        scored_train.features = transform(model, train.features, k);
        scored_test.features = transform(model, test.features, k);
        scored_train.feature_names.clear();
        for (std::size_t j = 0; j < k; ++j) scored_train.feature_names.push_back("PC" + std::to_string(j + 1));
        scored_test.feature_names = scored_train.feature_names;
        train = std::move(scored_train);
        test = std::move(scored_test);
        rec.selected_features = train.feature_names;
        rec.fitted_components += "selector pca components " + std::to_string(k) + "\n";
        for (std::size_t j = 0; j < model.dimension(); ++j) {
            rec.fitted_components += fmt(model.eigenvalues[j]);
            for (std::size_t l = 0; l < model.dimension(); ++l) rec.fitted_components += " " + fmt(model.loadings(l, j));
            rec.fitted_components += "\n";
        }
        break;
    }
    }
    rec.timings.push_back({"select", seconds_since(t0)});

    std::vector<std::size_t> predicted;
    double train_seconds = 0.0;
    double predict_seconds = 0.0;
    if (cfg.classifier == ClassifierKind::rf) {
        ForestConfig fcfg = cfg.forest;
        fcfg.seed = cfg.forest_seed.value_or(cfg.seed);
        t0 = Clock::now();
        const ForestModel forest = train_forest(train, fcfg);
        train_seconds = seconds_since(t0);
        t0 = Clock::now();
        predicted = predict(forest, test.features);
        predict_seconds = seconds_since(t0);
        rec.forest_importance = feature_importance(forest);
        rec.model_text = serialize(forest);
    } else {
        SVMConfig scfg = cfg.svm;
        scfg.seed = cfg.seed;
        t0 = Clock::now();
        const SVMModel svm = train_svm(train, scfg);
        train_seconds = seconds_since(t0);
        t0 = Clock::now();
        predicted = predict(svm, test.features);
        predict_seconds = seconds_since(t0);
        rec.model_text = dump_svm(svm);
    }
    rec.fitted_components += rec.model_text;
    rec.timings.push_back({"train", train_seconds});
    rec.timings.push_back({"predict", predict_seconds});

    t0 = Clock::now();
    rec.evaluation = evaluate(test.labels, predicted, rec.class_names);
    rec.evaluation.train_seconds = train_seconds;
    rec.evaluation.predict_seconds = predict_seconds;
    rec.timings.push_back({"evaluate", seconds_since(t0)});
    return rec;
}

RunRecord run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto t0 = Clock::now();
    const RawDataset raw = load_experiment_data(cfg);
    const double load_seconds = seconds_since(t0);
    return run_on_split(cfg, raw, split_indices(raw.rows(), cfg.test_fraction, cfg.seed), load_seconds);
}

std::vector<SplitIndices> fold_indices(std::size_t n, std::size_t folds, std::uint64_t seed) {
    if (folds < 2) throw ConfigError("cross-validation needs at least 2 folds");
    if (n < folds) throw DataError(DataErrorKind::too_few_rows, "fewer rows than folds");
    Rng rng(seed);
    const auto perm = rng.permutation(n);
    std::vector<SplitIndices> out(folds);
    for (std::size_t pos = 0; pos < n; ++pos) {
        for (std::size_t f = 0; f < folds; ++f) {
            if (pos % folds == f) out[f].test.push_back(perm[pos]);
            else out[f].train.push_back(perm[pos]);
        }
    }
    for (auto& s : out) {
        std::sort(s.train.begin(), s.train.end());
        std::sort(s.test.begin(), s.test.end());
    }
    return out;
}

std::vector<RunRecord> run_cross_validation(const ExperimentConfig& cfg, std::size_t folds) {
    cfg.validate();
    const auto t0 = Clock::now();
    const RawDataset raw = load_experiment_data(cfg);
    const double load_seconds = seconds_since(t0);
    std::vector<RunRecord> out;
    for (const auto& s : fold_indices(raw.rows(), folds, cfg.seed)) out.push_back(run_on_split(cfg, raw, s, load_seconds));
    return out;
}

std::vector<ComparisonRow> compare_datasets(const std::vector<ExperimentConfig>& configs) {
    if (configs.empty()) throw ConfigError("compare needs at least one experiment");
    std::vector<ComparisonRow> rows;
    for (const auto& cfg : configs) {
        const auto rec = run_experiment(cfg);
        ComparisonRow r;
        r.dataset = cfg.label();
        r.selector = cfg.selector;
        r.classifier = cfg.classifier;
        r.accuracy = rec.evaluation.accuracy;
        r.macro_f1 = rec.evaluation.macro.f1;
        r.selected_features = rec.selected_features.size();
        if (rec.selector.boruta) {
            r.boruta_iterations = rec.selector.boruta->iterations_used;
            r.boruta_confirmed = rec.selector.boruta->count(FeatureDecision::confirmed);
            r.boruta_rejected = rec.selector.boruta->count(FeatureDecision::rejected);
        }
        for (const auto& t : rec.timings) {
            if (t.stage == "select") r.selector_seconds = t.seconds;
            r.total_seconds += t.seconds;
        }
        rows.push_back(std::move(r));
    }
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.accuracy > b.accuracy; });
    return rows;
}

std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
    std::string s = "dataset,selector,classifier,accuracy,macro_f1,selected_features,boruta_iterations,"
                    "boruta_confirmed,boruta_rejected,selector_seconds,total_seconds\n";
    char buf[64];
    for (const auto& r : rows) {
        s += r.dataset + "," + std::string(to_string(r.selector)) + "," + std::string(to_string(r.classifier)) + ",";
        std::snprintf(buf, sizeof buf, "%.6f,%.6f,", r.accuracy, r.macro_f1);
        s += buf;
        s += std::to_string(r.selected_features) + "," + std::to_string(r.boruta_iterations) + "," +
             std::to_string(r.boruta_confirmed) + "," + std::to_string(r.boruta_rejected) + ",";
        std::snprintf(buf, sizeof buf, "%.6f,%.6f\n", r.selector_seconds, r.total_seconds);
        s += buf;
    }
    return s;
}

} // namespace cyclonids
