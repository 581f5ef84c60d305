// Acceptance suite: one PASS / FAIL / SKIPPED line per criterion.
// Exit status is non-zero when any criterion fails.

#include "cyclonids/boruta.hpp"
#include "cyclonids/dataset.hpp"
#include "cyclonids/metrics.hpp"
#include "cyclonids/pca.hpp"
#include "cyclonids/preprocess.hpp"
#include "cyclonids/rng.hpp"
#include "cyclonids/runner.hpp"
#include "cyclonids/svm.hpp"
#include "cyclonids/synthgen.hpp"
#include "oracles/eigen_oracle.hpp"
#include "oracles/metrics_oracle.hpp"
#include "oracles/separator_oracle.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

using namespace cyclonids;
namespace fs = std::filesystem;

namespace {

enum class Verdict { pass, fail, skipped };

struct Outcome {
    Verdict verdict;
    std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double limit_seconds, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {Verdict::fail, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (o.verdict == Verdict::pass && secs > limit_seconds) {
        o.verdict = Verdict::fail;
        o.detail += "; runtime limit exceeded";
    }
    const char* tag = o.verdict == Verdict::pass ? "PASS" : o.verdict == Verdict::fail ? "FAIL" : "SKIPPED";
    if (o.verdict == Verdict::fail) ++failures;
    std::printf("[%s] %d %s: %s (%.2f s, limit %.0f s)\n", tag, id, title, o.detail.c_str(), secs, limit_seconds);
    std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

fs::path data_dir() {
    if (const char* env = std::getenv("CYCLONIDS_DATA_DIR")) return env;
    return fs::path(CYCLONIDS_SOURCE_DIR) / "data";
}

std::optional<fs::path> find_data(std::initializer_list<const char*> names) {
    for (const char* n : names) {
        const auto p = data_dir() / n;
        if (fs::exists(p)) return p;
    }
    return std::nullopt;
}

std::vector<Matrix> random_matrices(std::uint64_t seed, int count) {
    Rng rng(seed);
    std::vector<Matrix> out;
    for (int t = 0; t < count; ++t) {
        const std::size_t p = 1 + rng.index(5);
        const std::size_t n = std::max<std::size_t>(2, p + rng.index(21 - p));
        Matrix m(n, p);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < p; ++j) {
                m(i, j) = rng.normal() * (0.1 + 10.0 * rng.uniform()) + 5.0 * static_cast<double>(j);
                if (j > 0 && t % 3 == 0) m(i, j) += m(i, 0);
            }
        if (t % 10 == 0 && p > 1)
            for (std::size_t i = 0; i < n; ++i) m(i, p - 1) = 3.0;
        out.push_back(std::move(m));
    }
    return out;
}

Outcome metrics_oracle() {
    Rng rng(1001);
    double worst = 0.0;
    std::size_t count_mismatch = 0;
    for (int t = 0; t < 1000; ++t) {
        const std::size_t k = 1 + rng.index(4);
        const std::size_t n = 1 + rng.index(50);
        std::vector<std::size_t> a(n), p(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = rng.index(k);
            p[i] = rng.index(k);
        }
        std::vector<std::string> names(k, "c");
        const auto ev = evaluate(a, p, names);
        worst = std::max(worst, std::abs(ev.accuracy - oracle::pair_accuracy(a, p)));
        double mp = 0, mr = 0, mf = 0;
        for (std::size_t c = 0; c < k; ++c) {
            const auto o = oracle::count_pairs(a, p, c);
            const auto& m = ev.per_class[c];
            count_mismatch += m.tp != o.tp || m.fp != o.fp || m.fn != o.fn || m.tn != o.tn ||
                              m.precision.undefined != o.precision_undefined ||
                              m.recall.undefined != o.recall_undefined || m.f1.undefined != o.f1_undefined;
            worst = std::max({worst, std::abs(m.precision.value - o.precision), std::abs(m.recall.value - o.recall),
                              std::abs(m.f1.value - o.f1)});
            mp += o.precision;
            mr += o.recall;
            mf += o.f1;
        }
        const double kk = static_cast<double>(k);
        worst = std::max({worst, std::abs(ev.macro.precision - mp / kk), std::abs(ev.macro.recall - mr / kk),
                          std::abs(ev.macro.f1 - mf / kk)});
    }
    const bool ok = count_mismatch == 0 && worst <= 1e-12;
    return {ok ? Verdict::pass : Verdict::fail,
            fmt("1000 cases, %zu integer mismatches, max real error %.3g (tol 1e-12)", count_mismatch, worst)};
}

Outcome pca_oracle() {
    double eig_err = 0.0, rec_err = 0.0, orth_err = 0.0;
    for (const auto& m : random_matrices(2002, 100)) {
        const std::size_t p = m.cols();
        const auto model = fit_pca(m);
        const Matrix cov = standardized_covariance(model.standardizer, m);
        oracle::Dense dense(p, std::vector<double>(p));
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = 0; j < p; ++j) dense[i][j] = cov(i, j);
        auto expect = oracle::eigenvalues(dense);
        std::reverse(expect.begin(), expect.end());
        for (std::size_t j = 0; j < p; ++j) eig_err = std::max(eig_err, std::abs(model.eigenvalues[j] - expect[j]));

        const auto& l = model.loadings;
        for (std::size_t a = 0; a < p; ++a)
            for (std::size_t b = 0; b < p; ++b) {
                double s = 0.0;
                for (std::size_t r = 0; r < p; ++r) s += l(r, a) * l(r, b);
                orth_err = std::max(orth_err, std::abs(s - (a == b ? 1.0 : 0.0)));
            }
        const Matrix z = transform(model.standardizer, m);
        const Matrix scores = transform(model, m, p);
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t r = 0; r < p; ++r) {
                double back = 0.0;
                for (std::size_t j = 0; j < p; ++j) back += scores(i, j) * l(r, j);
                rec_err = std::max(rec_err, std::abs(back - z(i, r)));
            }
    }
    const bool ok = eig_err < 1e-6 && rec_err < 1e-8 && orth_err < 1e-8;
    return {ok ? Verdict::pass : Verdict::fail,
            fmt("100 matrices, eigenvalue error %.3g (tol 1e-6), reconstruction %.3g (tol 1e-8), "
                "orthonormality %.3g (tol 1e-8)",
                eig_err, rec_err, orth_err)};
}

Outcome standardizer_check() {
    double mean_err = 0.0, std_err = 0.0;
    std::size_t columns = 0;
    auto matrices = random_matrices(2002, 100);
    const auto more = random_matrices(3003, 100);
    matrices.insert(matrices.end(), more.begin(), more.end());
    matrices.push_back(Matrix(3, 2, {1, 10, 2, 20, 3, 30}));
    matrices.push_back(Matrix(2, 1, {2, 4}));
    for (const auto& m : matrices) {
        const auto s = fit_standardizer(m);
        const auto z = transform(s, m);
        const double n = static_cast<double>(m.rows());
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (s.zero_variance[j]) continue;
            ++columns;
            double mean = 0.0, ss = 0.0;
            for (std::size_t i = 0; i < m.rows(); ++i) mean += z(i, j);
            mean /= n;
            for (std::size_t i = 0; i < m.rows(); ++i) ss += (z(i, j) - mean) * (z(i, j) - mean);
            mean_err = std::max(mean_err, std::abs(mean));
            std_err = std::max(std_err, std::abs(std::sqrt(ss / (n - 1.0)) - 1.0));
        }
    }
    const bool ok = mean_err < 1e-9 && std_err < 1e-9;
    return {ok ? Verdict::pass : Verdict::fail,
            fmt("%zu columns, max |mean| %.3g, max |std-1| %.3g (tol 1e-9)", columns, mean_err, std_err)};
}

Outcome boruta_recovery() {
    int passed = 0;
    std::string per_seed;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto r = gen_classification(SynthConfig{500, 3, 7, 2, 5.0, seed});
        BorutaConfig cfg;
        cfg.max_iterations = 20;
        cfg.alpha = 0.05;
        cfg.seed = seed;
        const auto res = run_boruta(r.data, cfg);
        bool informative = true;
        for (auto j : r.informative) informative = informative && res.decisions[j] == FeatureDecision::confirmed;
        std::size_t noise_rejected = 0;
        for (std::size_t j = 3; j < 10; ++j) noise_rejected += res.decisions[j] == FeatureDecision::rejected;
        const bool ok = informative && noise_rejected >= 6;
        passed += ok;
        per_seed += fmt(" %s%zu/%zu", ok ? "" : "!", res.count(FeatureDecision::confirmed), noise_rejected);
    }
    return {passed >= 9 ? Verdict::pass : Verdict::fail,
            fmt("%d/10 seeds recover 3 informative and >=6/7 noise rejected (need 9); confirmed/noise-rejected:%s",
                passed, per_seed.c_str())};
}

Outcome classifier_floor() {
    ExperimentConfig cfg;
    cfg.synth = SynthConfig{750, 3, 7, 2, 10.0, 42};
    cfg.forest.n_trees = 100;
    const auto rf = run_experiment(cfg);
    cfg.classifier = ClassifierKind::svm;
    const auto svm = run_experiment(cfg);

    const std::vector<std::pair<double, double>> pts{{0, 0}, {1, 1}, {0, 1}, {1, 0}};
    const double ceiling = oracle::best_linear_accuracy_2d(pts, {1, 1, -1, -1});
    const Matrix x(4, 2, {0, 0, 1, 1, 0, 1, 1, 0});
    const std::vector<std::size_t> y{0, 0, 1, 1};
    const auto model = train_svm(x, y, {"A", "B"}, SVMConfig{});
    const auto pred = predict(model, x);
    double xor_acc = 0.0;
    for (std::size_t i = 0; i < 4; ++i) xor_acc += pred[i] == y[i] ? 0.25 : 0.0;

    const bool ok = rf.n_train == 600 && rf.n_test == 150 && rf.evaluation.accuracy >= 0.95 &&
                    svm.evaluation.accuracy >= 0.95 && ceiling <= 0.75 && xor_acc <= 0.75;
    return {ok ? Verdict::pass : Verdict::fail,
            fmt("split %zu/%zu, RF %.4f, SVM %.4f (need >= 0.95); XOR train %.2f, linear ceiling %.2f (need <= 0.75)",
                rf.n_train, rf.n_test, rf.evaluation.accuracy, svm.evaluation.accuracy, xor_acc, ceiling)};
}

std::string strip_timings(const std::string& report) {
    auto j = nlohmann::json::parse(report);
    j.erase("timings");
    j["selector_report"].erase("elapsed_seconds");
    return j.dump(2);
}

Outcome determinism() {
    ExperimentConfig cfg;
    cfg.synth = SynthConfig{400, 3, 5, 3, 3.0, 7};
    cfg.selector = SelectorKind::boruta;
    cfg.boruta.max_iterations = 10;
    cfg.boruta.forest.n_trees = 50;
    const auto base = fs::temp_directory_path() / "cyclonids_acceptance";
    fs::remove_all(base);
    emit_reports(run_experiment(cfg), base / "a");
    emit_reports(run_experiment(cfg), base / "b");
    auto read = [](const fs::path& p) {
        std::FILE* f = std::fopen(p.string().c_str(), "rb");
        std::string s;
        char buf[4096];
        for (std::size_t r; f && (r = std::fread(buf, 1, sizeof buf, f)) > 0;) s.append(buf, r);
        if (f) std::fclose(f);
        return s;
    };
    const auto a = read(base / "a" / "report.json");
    const auto b = read(base / "b" / "report.json");
    fs::remove_all(base);
    const bool ok = !a.empty() && strip_timings(a) == strip_timings(b);
    return {ok ? Verdict::pass : Verdict::fail,
            fmt("report.json %zu bytes, identical after removing timing fields: %s", a.size(), ok ? "yes" : "no")};
}

Outcome ugransome() {
    const auto path = find_data({"ugransome.csv", "UGRansome.csv", "final(2).csv"});
    if (!path) return {Verdict::skipped, "no UGRansome file in " + data_dir().string()};
    ExperimentConfig cfg;
    cfg.schema = SchemaId::ugransome;
    cfg.data_path = *path;
    const auto rf = run_experiment(cfg);
    cfg.classifier = ClassifierKind::svm;
    const auto svm = run_experiment(cfg);
    cfg.classifier = ClassifierKind::rf;
    cfg.selector = SelectorKind::boruta;
    const auto bor = run_experiment(cfg);
    const auto rejected = bor.selector.boruta->count(FeatureDecision::rejected);
    const bool classes = rf.evaluation.matrix.class_names ==
                         std::vector<std::string>{"Signature", "SyntheticSignature", "Anomaly"};
    const bool ok = rf.evaluation.accuracy >= 0.95 && svm.evaluation.accuracy >= 0.90 && rejected == 0 && classes;
    return {ok ? Verdict::pass : Verdict::fail,
            fmt("RF %.4f (need >= 0.95), SVM %.4f (need >= 0.90), Boruta rejected %zu (need 0), classes %s",
                rf.evaluation.accuracy, svm.evaluation.accuracy, rejected, classes ? "ok" : "wrong")};
}

Outcome kdd_share() {
    const auto path = find_data({"kdd99.csv", "kddcup.data", "kddcup.data_10_percent", "kddcup.data.corrected"});
    if (!path) return {Verdict::skipped, "no KDD99 file in " + data_dir().string()};
    const auto raw = load_csv(*path, kdd99_schema());
    const auto counts = class_counts(raw.labels, 5);
    const double share = static_cast<double>(counts[0] + counts[1]) / static_cast<double>(raw.rows());
    return {share >= 0.9 ? Verdict::pass : Verdict::fail,
            fmt("%zu rows, Normal+DoS share %.4f (need >= 0.9)", raw.rows(), share)};
}

} // namespace

int main() {
    criterion(1, "metrics oracle", 5, metrics_oracle);
    criterion(2, "PCA eigen oracle", 10, pca_oracle);
    criterion(3, "standardizer moments", 1, standardizer_check);
    criterion(4, "Boruta planted-feature recovery", 60, boruta_recovery);
    criterion(5, "classifier floor and XOR ceiling", 30, classifier_floor);
    criterion(6, "report determinism", 30, determinism);
    criterion(7, "UGRansome accuracy, Boruta and classes", 1800, ugransome);
    criterion(8, "KDD99 Normal+DoS share", 1800, kdd_share);
    std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
