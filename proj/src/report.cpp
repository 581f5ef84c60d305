#include "cyclonids/errors.hpp"
#include "cyclonids/io.hpp"
#include "cyclonids/runner.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>

#ifndef CYCLONIDS_VERSION
#define CYCLONIDS_VERSION "0.0.0"
#endif

namespace cyclonids {

namespace {

using nlohmann::json;

json ratio_json(const Ratio& r) { return r.undefined ? json(nullptr) : json(r.value); }

json config_json(const ExperimentConfig& c) {
    json j;
    j["name"] = c.label();
    j["schema"] = to_string(c.schema);
    j["data_path"] = c.data_path.string();
    if (c.schema == SchemaId::synthetic && c.data_path.empty()) {
        j["synth"] = {{"n", c.synth.n_samples},      {"inf", c.synth.n_informative},
                      {"noise", c.synth.n_noise},    {"classes", c.synth.n_classes},
                      {"sep", c.synth.class_separation}, {"seed", c.synth.seed}};
    }
    j["selector"] = to_string(c.selector);
    j["classifier"] = to_string(c.classifier);
    j["encoding"] = to_string(c.effective_encoding());
    j["max_onehot_levels"] = c.max_onehot_levels;
    j["test_fraction"] = c.test_fraction;
    j["seed"] = c.seed;
    if (c.selector == SelectorKind::boruta)
        j["boruta"] = {{"max_iterations", c.boruta.max_iterations},
                       {"alpha", c.boruta.alpha},
                       {"n_trees", c.boruta.forest.n_trees}};
    if (c.selector == SelectorKind::pca) j["pca_threshold"] = c.pca_threshold;
    if (c.classifier == ClassifierKind::rf)
        j["forest"] = {{"n_trees", c.forest.n_trees},
                       {"max_depth", c.forest.max_depth},
                       {"min_samples_split", c.forest.min_samples_split},
                       {"mtry", c.forest.mtry},
                       {"seed", c.forest_seed.value_or(c.seed)}};
    else
        j["svm"] = {{"c", c.svm.c}, {"max_epochs", c.svm.max_epochs}, {"tolerance", c.svm.tolerance}};
    return j;
}

json selector_json(const RunRecord& rec) {
    const auto& s = rec.selector;
    json j;
    j["kind"] = to_string(s.kind);
    if (s.boruta) {
        const auto& b = *s.boruta;
        j["dataset"] = rec.config.label();
        j["elapsed_seconds"] = b.elapsed.count();
        j["iterations"] = b.iterations_used;
        j["confirmed"] = b.count(FeatureDecision::confirmed);
        j["tentative"] = b.count(FeatureDecision::tentative);
        j["rejected"] = b.count(FeatureDecision::rejected);
        j["fallback"] = s.fallback;
        json decisions = json::array();
        for (std::size_t f = 0; f < b.decisions.size(); ++f)
            decisions.push_back({{"feature", rec.feature_names[f]},
                                 {"decision", to_string(b.decisions[f])},
                                 {"hits", b.hits[f]}});
        j["decisions"] = std::move(decisions);
        json history = json::array();
        for (const auto& it : b.z_history) history.push_back({{"z", it.z}, {"max_shadow_z", it.max_shadow_z}});
        j["z_history"] = std::move(history);
    }
    if (s.kind == SelectorKind::pca) {
        j["components"] = s.components;
        j["threshold"] = rec.config.pca_threshold;
        j["explained_variance_ratio"] = s.explained_variance_ratio;
        json ranking = json::array();
        for (const auto& fs : s.salience)
            ranking.push_back({{"feature", rec.feature_names[fs.feature]}, {"salience", fs.score}});
        j["salience"] = std::move(ranking);
    }
    return j;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

} // namespace

std::string report_json(const RunRecord& rec) {
    json j;
    j["config"] = config_json(rec.config);
    j["seed"] = rec.config.seed;
    j["versions"] = {{"cyclonids", CYCLONIDS_VERSION}, {"report_format", 1}};
    j["metrics_scope"] = "test_split";
    j["split"] = {{"n_train", rec.n_train}, {"n_test", rec.n_test}, {"test_fraction", rec.config.test_fraction}};
    json dist;
    for (std::size_t c = 0; c < rec.class_names.size(); ++c) {
        dist["train"][rec.class_names[c]] = rec.train_class_counts[c];
        dist["test"][rec.class_names[c]] = rec.test_class_counts[c];
    }
    j["class_distribution"] = dist;
    j["categorical_counts"] = rec.categorical_counts;
    j["selected_features"] = rec.selected_features;
    j["selector_report"] = selector_json(rec);

    const auto& ev = rec.evaluation;
    j["confusion_matrix"] = {{"class_names", ev.matrix.class_names},
                             {"counts", ev.matrix.counts},
                             {"orientation", "rows=actual,columns=predicted"}};
    json per_class = json::array();
    for (std::size_t c = 0; c < ev.per_class.size(); ++c) {
        const auto& m = ev.per_class[c];
        per_class.push_back({{"class", ev.matrix.class_names[c]},
                             {"tp", m.tp},
                             {"fp", m.fp},
                             {"fn", m.fn},
                             {"tn", m.tn},
                             {"precision", ratio_json(m.precision)},
                             {"recall", ratio_json(m.recall)},
                             {"f1", ratio_json(m.f1)}});
    }
    j["per_class_metrics"] = std::move(per_class);
    j["accuracy"] = ev.accuracy;
    j["macro_precision"] = ev.macro.precision;
    j["macro_recall"] = ev.macro.recall;
    j["macro_f1"] = ev.macro.f1;
    if (!rec.forest_importance.empty()) {
        json imp;
        for (std::size_t f = 0; f < rec.forest_importance.size(); ++f)
            imp[rec.selected_features[f]] = rec.forest_importance[f];
        j["feature_importance"] = std::move(imp);
    }
    json timings;
    for (const auto& t : rec.timings) timings[t.stage] = t.seconds;
    j["timings"] = std::move(timings);
    return j.dump(2) + "\n";
}

std::string confusion_csv(const RunRecord& rec) {
    const auto& cm = rec.evaluation.matrix;
    std::string s = "actual\\predicted";
    for (const auto& n : cm.class_names) s += "," + csv_field(n);
    s += "\n";
    for (std::size_t a = 0; a < cm.classes(); ++a) {
        s += csv_field(cm.class_names[a]);
        for (auto v : cm.counts[a]) s += "," + std::to_string(v);
        s += "\n";
    }
    return s;
}

std::string selector_csv(const RunRecord& rec) {
    char buf[64];
    if (rec.selector.boruta) {
        const auto& b = *rec.selector.boruta;
        std::snprintf(buf, sizeof buf, "%.6f", b.elapsed.count());
        return "dataset,elapsed_seconds,iterations,confirmed,tentative,rejected\n" + csv_field(rec.config.label()) +
               "," + buf + "," + std::to_string(b.iterations_used) + "," +
               std::to_string(b.count(FeatureDecision::confirmed)) + "," +
               std::to_string(b.count(FeatureDecision::tentative)) + "," +
               std::to_string(b.count(FeatureDecision::rejected)) + "\n";
    }
    if (rec.selector.kind == SelectorKind::pca) {
        std::string s = "rank,feature,salience\n";
        for (std::size_t r = 0; r < rec.selector.salience.size(); ++r) {
            const auto& fs = rec.selector.salience[r];
            std::snprintf(buf, sizeof buf, "%.12g", fs.score);
            s += std::to_string(r + 1) + "," + csv_field(rec.feature_names[fs.feature]) + "," + buf + "\n";
        }
        return s;
    }
    std::string s = "feature\n";
    for (const auto& f : rec.selected_features) s += csv_field(f) + "\n";
    return s;
}

std::string svg_bar_chart(const std::string& title, const std::vector<std::string>& labels,
                          const std::vector<double>& values) {
    const std::size_t n = std::min(labels.size(), values.size());
    const int bar_h = 18, gap = 6, label_w = 220, chart_w = 420, top = 40;
    const int height = top + static_cast<int>(n) * (bar_h + gap) + 20;
    const int width = label_w + chart_w + 120;
    double vmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) vmax = std::max(vmax, values[i]);
    char buf[256];
    std::string s;
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" font-family=\"sans-serif\" "
                  "font-size=\"12\">\n",
                  width, height);
    s += buf;
    s += "<text x=\"10\" y=\"24\" font-size=\"16\">" + xml_escape(title) + "</text>\n";
    for (std::size_t i = 0; i < n; ++i) {
        const int y = top + static_cast<int>(i) * (bar_h + gap);
        const double w = vmax > 0.0 ? values[i] / vmax * chart_w : 0.0;
        s += "<text x=\"" + std::to_string(label_w - 6) + "\" y=\"" + std::to_string(y + 13) +
             "\" text-anchor=\"end\">" + xml_escape(labels[i]) + "</text>\n";
        std::snprintf(buf, sizeof buf, "<rect x=\"%d\" y=\"%d\" width=\"%.2f\" height=\"%d\" fill=\"#4a7ab5\"/>\n",
                      label_w, y, w, bar_h);
        s += buf;
        std::snprintf(buf, sizeof buf, "<text x=\"%.2f\" y=\"%d\">%.6g</text>\n", label_w + w + 6, y + 13, values[i]);
        s += buf;
    }
    s += "</svg>\n";
    return s;
}

std::vector<std::filesystem::path> emit_reports(const RunRecord& rec, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir / "charts", ec);
    if (ec) throw DataError(DataErrorKind::io_write_failure, "cannot create " + (dir / "charts").string());

    std::vector<std::filesystem::path> written;
    auto put = [&](const std::filesystem::path& p, const std::string& content) {
        write_file_atomic(p, content);
        written.push_back(p);
    };
    put(dir / "report.json", report_json(rec));
    put(dir / "confusion.csv", confusion_csv(rec));
    put(dir / "selector.csv", selector_csv(rec));
    if (!rec.model_text.empty()) put(dir / "model.txt", rec.model_text);

    std::vector<double> counts;
    for (std::size_t c = 0; c < rec.class_names.size(); ++c)
        counts.push_back(static_cast<double>(rec.train_class_counts[c] + rec.test_class_counts[c]));
    put(dir / "charts" / "class_distribution.svg", svg_bar_chart("Class distribution", rec.class_names, counts));

    if (rec.selector.kind == SelectorKind::pca) {
        std::vector<std::string> names;
        std::vector<double> scores;
        for (const auto& fs : rec.selector.salience) {
            names.push_back(rec.feature_names[fs.feature]);
            scores.push_back(fs.score);
        }
        put(dir / "charts" / "salience.svg", svg_bar_chart("PCA feature salience", names, scores));
    }
    if (rec.selector.boruta) {
        std::vector<double> hits;
        for (auto h : rec.selector.boruta->hits) hits.push_back(static_cast<double>(h));
        put(dir / "charts" / "boruta_hits.svg", svg_bar_chart("Boruta hits per feature", rec.feature_names, hits));
    }
    if (!rec.forest_importance.empty())
        put(dir / "charts" / "importance.svg",
            svg_bar_chart("Random Forest feature importance", rec.selected_features, rec.forest_importance));
    return written;
}

} // namespace cyclonids
