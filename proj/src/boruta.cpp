#include "cyclonids/boruta.hpp"

#include "cyclonids/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cyclonids {

void BorutaConfig::validate() const {
    if (max_iterations < 1) throw ConfigError("boruta: max_iterations must be >= 1");
    if (!(alpha > 0.0 && alpha <= 0.5)) throw ConfigError("boruta: alpha must lie in (0, 0.5]");
    forest.validate();
    if (forest.n_trees < 2) throw ConfigError("boruta: the forest needs at least 2 trees for Z-scores");
}

std::string_view to_string(FeatureDecision d) {
    switch (d) {
    case FeatureDecision::tentative: return "Tentative";
    case FeatureDecision::confirmed: return "Confirmed";
    case FeatureDecision::rejected: return "Rejected";
    }
    return "?";
}

std::size_t BorutaResult::count(FeatureDecision d) const {
    return static_cast<std::size_t>(std::count(decisions.begin(), decisions.end(), d));
}

std::vector<std::size_t> BorutaResult::confirmed() const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < decisions.size(); ++j)
        if (decisions[j] == FeatureDecision::confirmed) out.push_back(j);
    return out;
}

Matrix augment_with_shadows(const Matrix& m, Rng& rng) {
    const std::size_t n = m.rows();
    const std::size_t p = m.cols();
    Matrix out(n, 2 * p);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) out(i, j) = m(i, j);
    for (std::size_t j = 0; j < p; ++j) {
        const auto perm = rng.permutation(n);
        for (std::size_t i = 0; i < n; ++i) out(i, p + j) = m(perm[i], j);
    }
    return out;
}

std::vector<double> z_scores(const Matrix& imp) {
    const std::size_t t = imp.rows();
    if (t < 2) throw ConfigError("z_scores: need importances from at least 2 trees");
    std::vector<double> z(imp.cols());
    for (std::size_t j = 0; j < imp.cols(); ++j) {
        double mean = 0.0;
        for (std::size_t r = 0; r < t; ++r) mean += imp(r, j);
        mean /= static_cast<double>(t);
        double ss = 0.0;
        for (std::size_t r = 0; r < t; ++r) ss += (imp(r, j) - mean) * (imp(r, j) - mean);
        bool constant = true;
        for (std::size_t r = 1; r < t && constant; ++r) constant = imp(r, j) == imp(0, j);
        const double sd = constant ? 0.0 : std::sqrt(ss / static_cast<double>(t - 1));
        if (sd > 0.0) z[j] = mean / sd;
        else z[j] = mean != 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    return z;
}

double binomial_two_sided_p(std::size_t hits, std::size_t trials) {
    if (hits > trials) throw ConfigError("binomial test: hits exceed trials");
    const long double n = static_cast<long double>(trials);
    auto pmf = [&](std::size_t i) {
        const long double k = static_cast<long double>(i);
        return std::exp(std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1) - n * std::log(2.0L));
    };
    long double lower = 0.0L;
    long double upper = 0.0L;
    for (std::size_t i = 0; i <= trials; ++i) {
        const long double pr = pmf(i);
        if (i <= hits) lower += pr;
        if (i >= hits) upper += pr;
    }
    return static_cast<double>(std::min(1.0L, 2.0L * std::min(lower, upper)));
}

BorutaResult run_boruta(const Dataset& d, const BorutaConfig& cfg) {
    cfg.validate();
    const std::size_t p = d.cols();
    if (p < 1) throw DataError(DataErrorKind::empty_dataset, "boruta: dataset has no features");
    if (d.rows() < 2) throw DataError(DataErrorKind::too_few_rows, "boruta: need at least 2 rows");

    const auto start = std::chrono::steady_clock::now();
    BorutaResult res;
    res.decisions.assign(p, FeatureDecision::tentative);
    res.hits.assign(p, 0);
    Rng rng(cfg.seed);

    for (std::size_t it = 1; it <= cfg.max_iterations; ++it) {
        // Rejected features (and their shadows) leave the forest; confirmed ones stay.
        std::vector<std::size_t> active;
        for (std::size_t j = 0; j < p; ++j)
            if (res.decisions[j] != FeatureDecision::rejected) active.push_back(j);
        const std::size_t q = active.size();

        const Matrix real = d.features.select_cols(active);
        const Matrix augmented = augment_with_shadows(real, rng);
        if (cfg.check_shadows) {
            for (std::size_t j = 0; j < q; ++j) {
                auto a = real.column(j);
                auto b = augmented.column(q + j);
                std::sort(a.begin(), a.end());
                std::sort(b.begin(), b.end());
                if (a != b) throw NumericError("boruta: shadow column is not a permutation of its source");
            }
        }

        // The forest breaks equal-gain ties by lowest column index; a random
        // column order keeps that rule from favouring real over shadow features.
        const auto order = rng.permutation(2 * q);
        const Matrix mixed = augmented.select_cols(order);

        ForestConfig fcfg = cfg.forest;
        fcfg.seed = splitmix64(cfg.seed ^ splitmix64(it));
        const ForestModel forest = train_forest(mixed, d.labels, d.class_names, fcfg);
        const auto mixed_z = z_scores(forest.per_tree_importance());
        std::vector<double> z(2 * q);
        for (std::size_t k = 0; k < 2 * q; ++k) z[order[k]] = mixed_z[k];
        const double mzs = *std::max_element(z.begin() + static_cast<std::ptrdiff_t>(q), z.end());

        BorutaIteration record;
        record.z.assign(p, std::numeric_limits<double>::quiet_NaN());
        record.max_shadow_z = mzs;
        for (std::size_t a = 0; a < q; ++a) {
            const std::size_t j = active[a];
            record.z[j] = z[a];
            if (res.decisions[j] == FeatureDecision::tentative && z[a] > mzs) ++res.hits[j];
        }
        res.z_history.push_back(std::move(record));
        res.iterations_used = it;

        bool any_tentative = false;
        for (std::size_t j = 0; j < p; ++j) {
            if (res.decisions[j] != FeatureDecision::tentative) continue;
            if (binomial_two_sided_p(res.hits[j], it) < cfg.alpha)
                res.decisions[j] = 2 * res.hits[j] > it ? FeatureDecision::confirmed : FeatureDecision::rejected;
            else
                any_tentative = true;
        }
        if (!any_tentative) break;
    }
    res.elapsed = std::chrono::steady_clock::now() - start;
    return res;
}

} // namespace cyclonids
