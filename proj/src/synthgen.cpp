#include "cyclonids/synthgen.hpp"

#include "cyclonids/errors.hpp"
#include "cyclonids/rng.hpp"

#include <charconv>
#include <string>

namespace cyclonids {

void SynthConfig::validate() const {
    if (n_informative < 1) throw ConfigError("synth: need at least one informative feature");
    if (n_classes < 2) throw ConfigError("synth: need at least two classes");
    if (n_samples < n_classes * 10) throw ConfigError("synth: need n_samples >= 10 * n_classes");
    if (!(class_separation >= 0.0)) throw ConfigError("synth: separation must be non-negative");
}

namespace {

template <class T>
T parse_value(std::string_view key, std::string_view text) {
    T v{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw ConfigError("synth: bad value for '" + std::string(key) + "': '" + std::string(text) + "'");
    return v;
}

} // namespace

SynthConfig parse_synth_config(std::string_view text) {
    SynthConfig cfg;
    while (!text.empty()) {
        auto comma = text.find(',');
        auto item = text.substr(0, comma);
        text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
        if (item.empty()) continue;
        auto eq = item.find('=');
        if (eq == std::string_view::npos) throw ConfigError("synth: expected key=value, got '" + std::string(item) + "'");
        auto key = item.substr(0, eq);
        auto value = item.substr(eq + 1);
        if (key == "n") cfg.n_samples = parse_value<std::size_t>(key, value);
        else if (key == "inf") cfg.n_informative = parse_value<std::size_t>(key, value);
        else if (key == "noise") cfg.n_noise = parse_value<std::size_t>(key, value);
        else if (key == "classes") cfg.n_classes = parse_value<std::size_t>(key, value);
        else if (key == "sep") cfg.class_separation = parse_value<double>(key, value);
        else if (key == "seed") cfg.seed = parse_value<std::uint64_t>(key, value);
        else throw ConfigError("synth: unknown key '" + std::string(key) + "'");
    }
    cfg.validate();
    return cfg;
}

SynthResult gen_classification(const SynthConfig& cfg) {
    cfg.validate();
    const std::size_t p = cfg.n_informative + cfg.n_noise;
    const std::size_t k = cfg.n_classes;
    Rng rng(cfg.seed);

    SynthResult out;
    auto& d = out.data;
    d.features = Matrix(cfg.n_samples, p);
    d.labels.resize(cfg.n_samples);
    d.schema = SchemaId::synthetic;
    const auto schema = synthetic_schema(p, k);
    d.class_names = schema.class_names;
    for (std::size_t j = 0; j < p; ++j) d.feature_names.push_back(schema.columns[j].name);

    const double centre = (static_cast<double>(k) - 1.0) / 2.0;
    for (std::size_t i = 0; i < cfg.n_samples; ++i) {
        const std::size_t c = i % k;
        d.labels[i] = c;
        for (std::size_t j = 0; j < cfg.n_informative; ++j) {
            const double mean = cfg.class_separation * (static_cast<double>((c + j) % k) - centre);
            d.features(i, j) = mean + rng.normal();
        }
        for (std::size_t j = cfg.n_informative; j < p; ++j) d.features(i, j) = rng.normal();
    }
    for (std::size_t j = 0; j < cfg.n_informative; ++j) out.informative.push_back(j);
    return out;
}

} // namespace cyclonids
